import { describe, expect, it } from 'vitest';

import { TaskweaveClient } from '../src/api.js';
import { DraftSpec, emptyDraft, TaskPanelState, WEIGHT_SUM_TOLERANCE } from '../src/state.js';
import { jsonResponse, matchResponse, recordingFetch, taskMatch } from './helpers.js';

function draft(weights: Record<string, number>): DraftSpec {
  return {
    objective: 'book a flight',
    inputs: [{ name: 'origin', type: 'string' }],
    outputs: [{ name: 'fare', type: 'float' }],
    weights,
  };
}

describe('emptyDraft', () => {
  it('splits weight evenly across the attribute schema', () => {
    const fresh = emptyDraft(['latency_ms', 'reliability', 'throughput_rps', 'cost']);
    expect(Object.values(fresh.weights)).toEqual([0.25, 0.25, 0.25, 0.25]);
    expect(fresh.objective).toBe('');
    expect(fresh.inputs).toEqual([]);
    expect(fresh.outputs).toEqual([]);
  });
});

describe('TaskPanelState editing', () => {
  it('marks the draft dirty on any edit', () => {
    const state = new TaskPanelState('task-a', draft({ cost: 1 }));
    expect(state.dirty).toBe(false);
    state.setObjective('quote a fare');
    expect(state.dirty).toBe(true);

    const again = new TaskPanelState('task-a', draft({ cost: 1 }));
    again.setWeight('cost', 0.4);
    expect(again.dirty).toBe(true);

    const third = new TaskPanelState('task-a', draft({ cost: 1 }));
    third.setParams([{ name: 'city', type: 'string' }], []);
    expect(third.dirty).toBe(true);
  });

  it('normalizes the weight preview to a unit sum', () => {
    const state = new TaskPanelState('task-a', draft({ a: 3, b: 1, c: 4 }));
    const preview = state.normalizedPreview();
    const total = Object.values(preview).reduce((acc, v) => acc + v, 0);
    expect(total).toBeCloseTo(1, 12);
    expect(preview.a).toBeCloseTo(3 / 8, 12);
    expect(preview.c).toBeCloseTo(4 / 8, 12);
  });

  it('falls back to an even preview split when every weight is zero', () => {
    const state = new TaskPanelState('task-a', draft({ a: 0, b: 0 }));
    expect(state.normalizedPreview()).toEqual({ a: 0.5, b: 0.5 });
  });

  it('accepts weight sums within tolerance of 1', () => {
    const nearOne = 0.7 - WEIGHT_SUM_TOLERANCE / 2;
    const state = new TaskPanelState('task-a', draft({ a: 0.3, b: nearOne }));
    expect(state.weightSumIssue()).toBeNull();
  });

  it('flags weight sums away from 1', () => {
    const state = new TaskPanelState('task-a', draft({ a: 0.7, b: 0.5 }));
    expect(state.weightSumIssue()).toBe('weights must sum to 1 (currently 1.200000)');
  });

  it('treats an empty weight map as server-side defaults', () => {
    const state = new TaskPanelState('task-a', draft({}));
    expect(state.weightSumIssue()).toBeNull();
  });
});

describe('saveAndRerank', () => {
  it('blocks weight-sum violations before any request leaves the client', async () => {
    const stub = recordingFetch(() => jsonResponse({}));
    const client = new TaskweaveClient('http://api.test', stub.fetch);
    const state = new TaskPanelState('task-a', draft({ a: 0.7, b: 0.5 }));
    const outcome = await state.saveAndRerank(client, 'demo');
    expect(outcome.kind).toBe('blocked');
    expect(outcome.errors).toEqual(['weights must sum to 1 (currently 1.200000)']);
    expect(stub.calls).toHaveLength(0);
  });

  it('saves, reruns matching, and adopts the fresh task slice', async () => {
    const slice = taskMatch({ taskId: 'task-a', candidates: [] });
    const response = matchResponse({ tasks: [taskMatch({ taskId: 'task-z' }), slice] });
    const stub = recordingFetch((url, init) =>
      init?.method === 'PUT'
        ? jsonResponse({ taskId: 'task-a', persisted: true, errors: [] })
        : jsonResponse(response),
    );
    const client = new TaskweaveClient('http://api.test', stub.fetch);
    const state = new TaskPanelState('task-a', draft({ a: 0.5, b: 0.5 }));
    state.setObjective('find flights');
    const outcome = await state.saveAndRerank(client, 'demo');
    expect(outcome.kind).toBe('reranked');
    expect(outcome.errors).toEqual([]);
    expect(outcome.match).toEqual(response);
    expect(state.lastMatch).toEqual(slice);
    expect(state.dirty).toBe(false);
    expect(stub.calls.map((c) => c.method)).toEqual(['PUT', 'POST']);
    expect(stub.calls[0].body).toMatchObject({ objective: 'find flights' });
  });

  it('surfaces field errors from a rejected spec and never calls match', async () => {
    const stub = recordingFetch(() =>
      jsonResponse(
        {
          taskId: 'task-a',
          persisted: false,
          errors: [{ taskId: 'task-a', message: 'weight for unknown attribute: speed' }],
        },
        422,
      ),
    );
    const client = new TaskweaveClient('http://api.test', stub.fetch);
    const state = new TaskPanelState('task-a', draft({ a: 1 }));
    state.setObjective('anything');
    const outcome = await state.saveAndRerank(client, 'demo');
    expect(outcome.kind).toBe('specRejected');
    expect(outcome.errors).toEqual(['weight for unknown attribute: speed']);
    expect(stub.calls).toHaveLength(1);
    expect(stub.calls[0].method).toBe('PUT');
    expect(state.dirty).toBe(true);
  });

  it('reports transport-level failures without clearing the draft', async () => {
    const stub = recordingFetch(() =>
      jsonResponse(
        { error: 'ConflictError', message: 'missing prerequisite: manifest', missing: 'manifest' },
        409,
      ),
    );
    const client = new TaskweaveClient('http://api.test', stub.fetch);
    const state = new TaskPanelState('task-a', draft({ a: 1 }));
    state.setObjective('anything');
    const outcome = await state.saveAndRerank(client, 'demo');
    expect(outcome.kind).toBe('failed');
    expect(outcome.errors).toEqual(['missing prerequisite: manifest']);
    expect(state.dirty).toBe(true);
  });

  it('coalesces overlapping saves into one run plus one trailing rerun', async () => {
    let release: () => void = () => undefined;
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    let firstPut = true;
    const stub = recordingFetch(async (url, init) => {
      if (init?.method === 'PUT') {
        if (firstPut) {
          firstPut = false;
          await gate;
        }
        return jsonResponse({ taskId: 'task-a', persisted: true, errors: [] });
      }
      return jsonResponse(matchResponse({ tasks: [taskMatch()] }));
    });
    const client = new TaskweaveClient('http://api.test', stub.fetch);
    const state = new TaskPanelState('task-a', draft({ a: 1 }));
    const first = state.saveAndRerank(client, 'demo');
    const second = state.saveAndRerank(client, 'demo');
    release();
    const [a, b] = await Promise.all([first, second]);
    expect(a.kind).toBe('reranked');
    expect(b).toBe(a);
    for (let i = 0; i < 50 && stub.calls.length < 4; i++) {
      await new Promise((resolve) => setTimeout(resolve, 0));
    }
    expect(stub.calls.map((c) => c.method)).toEqual(['PUT', 'POST', 'PUT', 'POST']);
  });
});

// Panel state for one service task: the draft spec being edited and the
// last match slice the server returned for it. The panel never computes
// utilities or reorders candidates; the server response is the only
// source of ranking truth.

import {
  ApiError,
  MatchResponse,
  ParamJson,
  SpecFieldError,
  SpecPayload,
  TaskMatchJson,
  TaskweaveClient,
} from './api.js';

// Matches the server's weight-sum tolerance so the gate never blocks a
// draft the server would accept.
export const WEIGHT_SUM_TOLERANCE = 1e-6;

export interface DraftSpec {
  objective: string;
  inputs: ParamJson[];
  outputs: ParamJson[];
  weights: Record<string, number>;
}

export interface RerankOutcome {
  kind: 'reranked' | 'blocked' | 'specRejected' | 'failed';
  /** Inline messages; empty on success. */
  errors: string[];
  match?: MatchResponse;
}

export function emptyDraft(attributes: string[]): DraftSpec {
  const weights: Record<string, number> = {};
  for (const name of attributes) weights[name] = 1 / attributes.length;
  return { objective: '', inputs: [], outputs: [], weights };
}

export class TaskPanelState {
  dirty = false;
  lastMatch: TaskMatchJson | null = null;
  private inflight: Promise<RerankOutcome> | null = null;
  private queued = false;

  constructor(
    public readonly taskId: string,
    public draft: DraftSpec,
  ) {}

  setObjective(text: string): void {
    this.draft.objective = text;
    this.dirty = true;
  }

  setWeight(name: string, value: number): void {
    this.draft.weights[name] = value;
    this.dirty = true;
  }

  setParams(inputs: ParamJson[], outputs: ParamJson[]): void {
    this.draft.inputs = inputs;
    this.draft.outputs = outputs;
    this.dirty = true;
  }

  /** Slider display values: raw weights scaled so the shown set sums to 1.
   *  All-zero drafts fall back to an even split so the preview invariant
   *  holds regardless of input. */
  normalizedPreview(): Record<string, number> {
    const entries = Object.entries(this.draft.weights);
    const total = entries.reduce((acc, [, v]) => acc + v, 0);
    const preview: Record<string, number> = {};
    for (const [name, value] of entries) {
      preview[name] = total > 0 ? value / total : 1 / entries.length;
    }
    return preview;
  }

  /** Client-side gate: only the sum is checked here; everything else is
   *  the server's call. Returns null when the draft may be submitted. */
  weightSumIssue(): string | null {
    const values = Object.values(this.draft.weights);
    if (values.length === 0) return null; // omitted weights default server-side
    const total = values.reduce((acc, v) => acc + v, 0);
    if (Math.abs(total - 1) <= WEIGHT_SUM_TOLERANCE) return null;
    return `weights must sum to 1 (currently ${total.toFixed(6)})`;
  }

  private payload(): SpecPayload {
    return {
      objective: this.draft.objective,
      inputs: this.draft.inputs,
      outputs: this.draft.outputs,
      weights: { ...this.draft.weights },
    };
  }

  /** Save the draft, re-run matching, and adopt the fresh slice.
   *
   *  A weight-sum violation stops everything before any request is made.
   *  A rejected spec (422 envelope) surfaces field errors and skips the
   *  match. Calls that arrive while a rerank is in flight coalesce into
   *  one trailing rerun instead of racing it.
   */
  async saveAndRerank(client: TaskweaveClient, projectId: string): Promise<RerankOutcome> {
    const issue = this.weightSumIssue();
    if (issue !== null) {
      return { kind: 'blocked', errors: [issue] };
    }
    if (this.inflight) {
      this.queued = true;
      return this.inflight;
    }
    this.inflight = this.execute(client, projectId);
    try {
      return await this.inflight;
    } finally {
      this.inflight = null;
      if (this.queued) {
        this.queued = false;
        void this.saveAndRerank(client, projectId);
      }
    }
  }

  private async execute(client: TaskweaveClient, projectId: string): Promise<RerankOutcome> {
    let saved;
    try {
      saved = await client.putTaskSpec(projectId, this.taskId, this.payload());
    } catch (error) {
      return { kind: 'failed', errors: [describe(error)] };
    }
    if (!saved.persisted) {
      return { kind: 'specRejected', errors: saved.errors.map((e: SpecFieldError) => e.message) };
    }
    this.dirty = false;
    try {
      const match = await client.runMatch(projectId);
      this.lastMatch = match.tasks.find((t) => t.taskId === this.taskId) ?? null;
      return { kind: 'reranked', errors: [], match };
    } catch (error) {
      return { kind: 'failed', errors: [describe(error)] };
    }
  }
}

export interface DownloadSink {
  (filename: string, bytes: Uint8Array, mediaType: string): void;
}

export interface ExportOutcome {
  kind: 'downloaded' | 'needsMatch' | 'failed';
  message: string;
}

const EXPORT_FILENAMES = {
  executableBpmn: 'process.executable.bpmn',
  wsonto: 'registry.ttl',
  bponto: 'process.ttl',
  validation: 'validation.json',
} as const;

/** Download an export, byte for byte as served. A conflict means no match
 *  has produced bindings yet, which the caller turns into a prompt. */
export async function downloadExport(
  client: TaskweaveClient,
  projectId: string,
  what: keyof typeof EXPORT_FILENAMES,
  save: DownloadSink,
): Promise<ExportOutcome> {
  try {
    const result = await client.fetchExport(projectId, what);
    save(EXPORT_FILENAMES[what], result.bytes, result.mediaType);
    return { kind: 'downloaded', message: EXPORT_FILENAMES[what] };
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      return { kind: 'needsMatch', message: 'run matching first, then export' };
    }
    return { kind: 'failed', message: describe(error) };
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return error.body?.message ?? `server error (${error.status})`;
  }
  return error instanceof Error ? error.message : String(error);
}

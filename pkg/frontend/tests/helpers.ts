// Shared test scaffolding: a recording fetch stub plus fixture builders
// shaped like real server payloads.

import {
  CandidateRow,
  FetchLike,
  MatchOptionsJson,
  MatchResponse,
  ProcessView,
  TaskMatchJson,
} from '../src/api.js';

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export interface FetchStub {
  fetch: FetchLike;
  calls: RecordedCall[];
}

type Responder = (url: string, init?: RequestInit) => Response | Promise<Response>;

/** Fetch stand-in that logs every request before answering with `respond`. */
export function recordingFetch(respond: Responder): FetchStub {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    const body = typeof init?.body === 'string' ? JSON.parse(init.body) : null;
    calls.push({ url, method: init?.method ?? 'GET', body });
    return respond(url, init);
  };
  return { fetch: fetchImpl, calls };
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

export const DEFAULT_OPTIONS: MatchOptionsJson = {
  tau: 0.25,
  maxDepth: 3,
  includeConsistency: true,
  categoryStats: false,
};

export function candidate(overrides: Partial<CandidateRow> = {}): CandidateRow {
  return {
    serviceKey: 'svc-quote',
    operation: 'quoteFare',
    degree: 'Exact',
    keywordScore: 0.5,
    utility: 0,
    ...overrides,
  };
}

export function taskMatch(overrides: Partial<TaskMatchJson> = {}): TaskMatchJson {
  return {
    taskId: 'task-a',
    name: 'Find Flights',
    keywords: ['flight', 'search'],
    stats: {},
    candidates: [],
    binding: null,
    ...overrides,
  };
}

export function matchResponse(overrides: Partial<MatchResponse> = {}): MatchResponse {
  return {
    projectId: 'demo',
    processId: 'travel-booking',
    options: DEFAULT_OPTIONS,
    tasks: [],
    unresolved: [],
    ...overrides,
  };
}

export function processView(overrides: Partial<ProcessView> = {}): ProcessView {
  return {
    projectId: 'demo',
    graph: { processId: 'travel-booking', nodes: [], edges: [] },
    specs: {},
    specsComplete: false,
    consistency: [],
    bindings: null,
    artifacts: {},
    ...overrides,
  };
}

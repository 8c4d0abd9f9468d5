// Typed client for the binding service. Every call goes through the
// documented routes; the fetch implementation is injectable so tests can
// run without a server.

export type DatatypeJson = string | { [field: string]: DatatypeJson };

export interface ParamJson {
  name: string;
  type: DatatypeJson;
}

export interface SpecPayload {
  objective: string;
  inputs: ParamJson[];
  outputs: ParamJson[];
  weights: Record<string, number> | null;
}

export interface SpecFieldError {
  taskId: string;
  message: string;
}

export interface SpecPutResult {
  taskId: string;
  persisted: boolean;
  errors: SpecFieldError[];
}

export interface CandidateRow {
  serviceKey: string;
  operation: string;
  degree: 'Exact' | 'Plugin' | 'Subsume' | 'Intersection' | 'Disjoint';
  keywordScore: number;
  utility: number | null;
}

export interface CompositeStep {
  serviceKey: string;
  operation: string;
}

export type BindingJson =
  | ({ kind: 'atomic' } & CandidateRow)
  | { kind: 'composite'; steps: CompositeStep[]; producedParams: ParamJson[] };

export interface AttributeStatsJson {
  mean: number;
  stddev: number;
  count: number;
}

export interface TaskMatchJson {
  taskId: string;
  name: string;
  keywords: string[];
  stats: Record<string, AttributeStatsJson>;
  candidates: CandidateRow[];
  binding: BindingJson | null;
}

export interface ConsistencyFinding {
  kind: 'typeMismatch' | 'missingProvider';
  severity: 'error' | 'info';
  upstreamTask: string;
  downstreamTask: string;
  paramName: string;
  outputType: string;
  inputType: string;
}

export interface MatchOptionsJson {
  tau: number;
  maxDepth: number;
  includeConsistency: boolean;
  categoryStats: boolean;
}

export interface MatchResponse {
  projectId: string;
  processId: string;
  options: MatchOptionsJson;
  tasks: TaskMatchJson[];
  unresolved: string[];
  consistency?: ConsistencyFinding[];
}

export interface GraphNodeJson {
  id: string;
  kind: string;
  name: string;
}

export interface GraphEdgeJson {
  flowId: string;
  sourceRef: string;
  targetRef: string;
}

export interface ProcessGraphJson {
  processId: string;
  nodes: GraphNodeJson[];
  edges: GraphEdgeJson[];
}

export interface TaskSpecJson {
  taskId: string;
  objective: string;
  inputs: ParamJson[];
  outputs: ParamJson[];
  weights?: Record<string, number>;
}

export interface BindingSetJson {
  processId: string;
  bindings: Record<string, BindingJson>;
  unresolved: string[];
  endpoints: Record<string, { address: string; wsdl: string }>;
}

export interface ProcessView {
  projectId: string;
  graph: ProcessGraphJson;
  specs: Record<string, TaskSpecJson>;
  specsComplete: boolean;
  consistency: ConsistencyFinding[];
  bindings: BindingSetJson | null;
  artifacts: Record<string, boolean | number>;
}

export type ExportKind = 'executableBpmn' | 'wsonto' | 'bponto' | 'validation';

export interface ExportResult {
  bytes: Uint8Array;
  mediaType: string;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: { error?: string; message?: string; missing?: string } | null,
  ) {
    super(body?.message ?? `request failed with status ${status}`);
    this.name = 'ApiError';
  }
}

async function errorBody(response: Response): Promise<ApiError> {
  try {
    return new ApiError(response.status, await response.json());
  } catch {
    return new ApiError(response.status, null);
  }
}

export class TaskweaveClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/+$/, '') + path;
  }

  async getProcess(projectId: string): Promise<ProcessView> {
    const response = await this.fetchImpl(this.url(`/projects/${projectId}/process`));
    if (!response.ok) throw await errorBody(response);
    return (await response.json()) as ProcessView;
  }

  /** A 422 here is the server's field-validation envelope, not a failure. */
  async putTaskSpec(projectId: string, taskId: string, spec: SpecPayload): Promise<SpecPutResult> {
    const response = await this.fetchImpl(this.url(`/projects/${projectId}/tasks/${taskId}/spec`), {
      method: 'PUT',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(spec),
    });
    if (response.status !== 200 && response.status !== 422) throw await errorBody(response);
    return (await response.json()) as SpecPutResult;
  }

  async runMatch(projectId: string, options?: Partial<MatchOptionsJson>): Promise<MatchResponse> {
    const response = await this.fetchImpl(this.url(`/projects/${projectId}/match`), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(options ?? {}),
    });
    if (!response.ok) throw await errorBody(response);
    return (await response.json()) as MatchResponse;
  }

  /** Raw export bytes, untouched; callers hand them straight to a download. */
  async fetchExport(projectId: string, what: ExportKind): Promise<ExportResult> {
    const response = await this.fetchImpl(this.url(`/projects/${projectId}/export/${what}`));
    if (!response.ok) throw await errorBody(response);
    const bytes = new Uint8Array(await response.arrayBuffer());
    return { bytes, mediaType: response.headers.get('content-type') ?? 'application/octet-stream' };
  }
}

/**
 * Typed client for the risk-layer service. The fetch implementation is
 * injectable so tests can run without a server.
 */

import type {
  EdgeQueryResponse,
  HealthResponse,
  RiskLayer,
  ScenarioRequest,
  ScenarioResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
  }

  /** Field-level messages from a validation failure, for inline display. */
  fieldMessages(): Record<string, string> {
    const out: Record<string, string> = {};
    if (Array.isArray(this.detail)) {
      // pydantic-style: [{loc: [...], msg: ...}, ...]
      for (const item of this.detail as { loc?: unknown[]; msg?: string }[]) {
        const loc = (item.loc ?? []).join('.');
        out[loc || 'request'] = item.msg ?? 'invalid';
      }
    } else if (typeof this.detail === 'string') {
      out.request = this.detail;
    }
    return out;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    const body = await resp.json();
    if (!resp.ok) throw new ApiError(resp.status, body.detail ?? body);
    return body as T;
  }

  health(): Promise<HealthResponse> {
    return this.get('/health');
  }

  currentLayer(): Promise<RiskLayer> {
    return this.get('/layers/current');
  }

  edgeWeights(ids: string[]): Promise<EdgeQueryResponse> {
    return this.get(`/layers/current/edges?ids=${encodeURIComponent(ids.join(','))}`);
  }

  async runScenario(request: ScenarioRequest): Promise<ScenarioResponse> {
    const resp = await this.fetchImpl(`${this.baseUrl}/scenarios`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(request),
    });
    const body = await resp.json();
    if (!resp.ok) throw new ApiError(resp.status, body.detail ?? body);
    return body as ScenarioResponse;
  }
}

import type { ChartModel, DeltaReportModel, RoundStatus, SessionView } from './types';

export class ApiError extends Error {
  constructor(
    public status: number,
    public machineCode: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<never> {
  let code = 'HttpError';
  let message = `${resp.status}`;
  try {
    const body = await resp.json();
    code = body.machine_code ?? code;
    message = body.message ?? message;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(resp.status, code, message);
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private token: string | null = null,
  ) {}

  setToken(token: string) {
    this.token = token;
  }

  private headers(json = true): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h['Content-Type'] = 'application/json';
    if (this.token) h['Authorization'] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: this.headers(body !== undefined),
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request('GET', `/sessions/${sessionId}`);
  }

  submitAllocation(
    sessionId: string,
    roundIndex: number,
    stakeholderId: string,
    tokens: Record<number, number>,
    rationale = '',
  ): Promise<{ round: RoundStatus; phase: string }> {
    return this.request(
      'PUT',
      `/sessions/${sessionId}/rounds/${roundIndex}/allocations/${stakeholderId}`,
      { tokens, rationale },
    );
  }

  submitScores(
    sessionId: string,
    stakeholderId: string,
    scores: Record<number, number>,
  ): Promise<{ phase: string; assessment_complete: boolean; awaiting: string[] }> {
    return this.request('PUT', `/sessions/${sessionId}/scores/${stakeholderId}`, { scores });
  }

  getPicture(sessionId: string, kind: 'target' | 'outcome'): Promise<ChartModel> {
    return this.request('GET', `/sessions/${sessionId}/picture?kind=${kind}`);
  }

  getDelta(sessionId: string): Promise<DeltaReportModel> {
    return this.request('GET', `/sessions/${sessionId}/delta`);
  }

  getAudit(sessionId: string): Promise<{ events: Array<Record<string, unknown>> }> {
    return this.request('GET', `/sessions/${sessionId}/audit`);
  }

  openRound(sessionId: string, triggerRef: string | null = null): Promise<{ round_index: number }> {
    return this.request('POST', `/sessions/${sessionId}/rounds`, { trigger_ref: triggerRef });
  }

  closeRound(sessionId: string, roundIndex: number): Promise<{ phase: string }> {
    return this.request('POST', `/sessions/${sessionId}/rounds/${roundIndex}/close`, {});
  }

  registerTrigger(
    sessionId: string,
    description: string,
    category = 'other',
  ): Promise<{ trigger_id: string }> {
    return this.request('POST', `/sessions/${sessionId}/triggers`, { description, category });
  }

  fireTrigger(sessionId: string, triggerId: string): Promise<{ phase: string }> {
    return this.request('POST', `/sessions/${sessionId}/triggers/${triggerId}/fire`, {});
  }

  startAssessment(sessionId: string): Promise<{ phase: string }> {
    return this.request('POST', `/sessions/${sessionId}/assessment/start`, {});
  }

  recordVerdict(
    sessionId: string,
    outcome: 'sufficient' | 'return_to_reprioritization',
    rationale: string,
  ): Promise<{ phase: string }> {
    return this.request('POST', `/sessions/${sessionId}/verdict`, { outcome, rationale });
  }

  createSession(body: unknown): Promise<{ session_id: string; tokens: Record<string, string> }> {
    return this.request('POST', `/sessions`, body);
  }
}

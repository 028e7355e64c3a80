// Typed client over the yardflow HTTP API. The console performs no metric
// arithmetic of its own: everything rendered comes out of these payloads.

export interface SegmentInfo {
  id: string;
  bay_start: number;
  bay_stop: number;
  capacity: number;
}

export interface Occupant {
  container_id: string;
  bay: number;
  row: number;
  tier: number;
  segment: string;
  category: string | null;
  stack_class: string | null;
  scores: number[] | null;
  remaining_free_days: number | null;
  appointment_block: number | null;
  appointment_origin: string | null;
  demurrage_rebooked: boolean;
}

export interface YardSnapshot {
  version: number;
  bays: number;
  rows: number;
  max_tier: number;
  segments: SegmentInfo[];
  occupants: Occupant[];
}

export interface VisitInfo {
  container_id: string;
  carrier_id: string | null;
  booked_at: number;
  origin: string;
}

export interface BlockInfo {
  index: number;
  truck_count: number;
  congested: boolean;
  visits: VisitInfo[];
}

export interface ScheduleSnapshot {
  version: number;
  day: string;
  block_capacity: number;
  blocks: BlockInfo[];
}

export interface HistogramBlock {
  index: number;
  before: number;
  after: number;
  capacity: number;
}

export interface HistogramSnapshot {
  version: number;
  blocks: HistogramBlock[];
}

export interface BookingRequest {
  container_id: string;
  block: number;
  dry_run: boolean;
  expected_version?: number;
}

export interface BookingMove {
  container_id: string;
  from_block: number;
  to_block: number;
  reason: string;
}

export interface BookingResponse {
  version: number;
  requested_block: number;
  proposed_block: number;
  moves: BookingMove[];
  placement: { bay: number; row: number; tier: number; segment: string };
  committed: boolean;
}

export interface ScenarioHistogramRow {
  index: number;
  demand: number;
  serviced: number;
  capacity: number;
}

export interface ScenarioOutcome {
  scenario: number;
  pt: number | null;
  m: number;
  seed: number;
  rehandles: number;
  histogram: ScenarioHistogramRow[];
  moves?: number;
  created?: number;
}

export interface JobStatus {
  version: number;
  job_id: string;
  status: "running" | "done" | "failed";
  scenario: number;
  result?: ScenarioOutcome;
  error?: string;
}

export interface RebalanceOutcome {
  version: number;
  moves: BookingMove[];
  created: { container_id: string; block: number }[];
  iterations: number;
  converged: boolean;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body === "object" && body !== null && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  yard(): Promise<YardSnapshot> {
    return this.request<YardSnapshot>("/yard");
  }

  schedule(): Promise<ScheduleSnapshot> {
    return this.request<ScheduleSnapshot>("/schedule");
  }

  histogram(): Promise<HistogramSnapshot> {
    return this.request<HistogramSnapshot>("/histogram");
  }

  metrics(): Promise<Record<string, unknown>> {
    return this.request<Record<string, unknown>>("/metrics");
  }

  registerContainer(row: Record<string, unknown>): Promise<Record<string, unknown>> {
    return this.post("/containers", row);
  }

  bookAppointment(request: BookingRequest): Promise<BookingResponse> {
    return this.post<BookingResponse>("/appointments", request);
  }

  async startOptimize(scenario: number, seed?: number): Promise<string> {
    const body = await this.post<{ job_id: string }>("/optimize", { scenario, seed });
    return body.job_id;
  }

  jobStatus(jobId: string): Promise<JobStatus> {
    return this.request<JobStatus>(`/jobs/${jobId}`);
  }

  rebalance(): Promise<RebalanceOutcome> {
    return this.post<RebalanceOutcome>("/rebalance", {});
  }
}

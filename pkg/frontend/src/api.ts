import type { DecisionRequest, Page, Progress, ProgressReport, ReviewItem } from './types'

export interface ListParams {
  undecided?: boolean
  page?: number
  pageSize?: number
  domain?: string
  docFormat?: string
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`API ${status}: ${detail}`)
  }
}

/** Thin typed client for the adjudication service. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init)
    if (!response.ok) {
      let detail = response.statusText
      try {
        const body = await response.json()
        if (body && typeof body.detail === 'string') detail = body.detail
      } catch {
        /* non-JSON error body; keep statusText */
      }
      throw new ApiError(response.status, detail)
    }
    return (await response.json()) as T
  }

  listDisagreements(params: ListParams = {}): Promise<Page> {
    const query = new URLSearchParams()
    if (params.undecided) query.set('undecided', 'true')
    query.set('page', String(params.page ?? 0))
    query.set('page_size', String(params.pageSize ?? 50))
    if (params.domain) query.set('domain', params.domain)
    if (params.docFormat) query.set('doc_format', params.docFormat)
    return this.request<Page>(`/api/v1/disagreements?${query}`)
  }

  getDisagreement(diffId: string): Promise<ReviewItem> {
    return this.request<ReviewItem>(`/api/v1/disagreements/${encodeURIComponent(diffId)}`)
  }

  postDecision(body: DecisionRequest): Promise<{ progress: Progress }> {
    return this.request<{ progress: Progress }>('/api/v1/decisions', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    })
  }

  getProgress(): Promise<ProgressReport> {
    return this.request<ProgressReport>('/api/v1/progress')
  }

  exportUrl(): string {
    return this.baseUrl + '/api/v1/export'
  }
}

/** Mirrors of the adjudication service's /api/v1 wire objects. */

export interface ContextToken {
  surface: string
  /** version name -> label string; absent versions were not aligned here */
  labels: Record<string, string>
}

export interface ExistingDecision {
  chosen_label: string
  chooser: string
  timestamp: string
  note: string | null
}

export interface ReviewItem {
  diff_id: string
  doc_index: number
  sentence_index: number
  token_index: number
  surface: string
  labels: Record<string, string>
  context: ContextToken[]
  /** index of the disputed token within `context` */
  context_offset: number
  decision: ExistingDecision | null
}

export interface Page {
  total: number
  page: number
  page_size: number
  items: ReviewItem[]
}

export interface Progress {
  total: number
  decided: number
  remaining: number
}

export interface VersionStats {
  decided: number
  per_version: Record<string, { wins: number; percent: number }>
  neither: { count: number; percent: number }
}

export interface ProgressReport extends Progress {
  per_version_stats: VersionStats
}

export interface DecisionRequest {
  diff_id: string
  chosen_label: string
  chooser: string
  note?: string | null
}

export const LABEL_PATTERN = /^(O|[BI]-[^\s-]+)$/

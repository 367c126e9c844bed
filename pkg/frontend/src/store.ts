import { ApiClient } from './api'
import type { DecisionRequest, Progress, ReviewItem } from './types'

export interface QueueState {
  items: ReviewItem[]
  total: number
  page: number
  pageSize: number
  undecidedOnly: boolean
  selected: number
  progress: Progress | null
  /** decisions accepted locally but not yet acknowledged by the server */
  pending: DecisionRequest[]
  banner: string | null
}

/** Queue state machine. The server is the source of truth: every mutation
 * here is either a re-fetch or an optimistic step that is reconciled against
 * the server's response; unacknowledged decisions stay in `pending` until a
 * retry succeeds. At most one decision write is in flight at a time. */
export class QueueStore {
  state: QueueState = {
    items: [],
    total: 0,
    page: 0,
    pageSize: 50,
    undecidedOnly: false,
    selected: 0,
    progress: null,
    pending: [],
    banner: null,
  }

  private listeners: Array<() => void> = []
  private writing = false

  constructor(
    readonly api: ApiClient,
    readonly chooser: string = 'adjudicator',
  ) {}

  subscribe(fn: () => void): void {
    this.listeners.push(fn)
  }

  private emit(): void {
    for (const fn of this.listeners) fn()
  }

  async load(page = this.state.page): Promise<void> {
    try {
      const result = await this.api.listDisagreements({
        undecided: this.state.undecidedOnly,
        page,
        pageSize: this.state.pageSize,
      })
      const progress = await this.api.getProgress()
      this.state.items = result.items
      this.state.total = result.total
      this.state.page = result.page
      this.state.progress = progress
      this.state.selected = Math.min(
        this.state.selected,
        Math.max(0, result.items.length - 1),
      )
      this.state.banner = null
    } catch (err) {
      this.state.banner = `load failed: ${String(err)}`
    }
    this.emit()
  }

  async toggleUndecided(): Promise<void> {
    this.state.undecidedOnly = !this.state.undecidedOnly
    this.state.page = 0
    this.state.selected = 0
    await this.load(0)
  }

  select(index: number): void {
    if (this.state.items.length === 0) return
    this.state.selected = Math.max(0, Math.min(index, this.state.items.length - 1))
    this.emit()
  }

  selectNext(): void {
    this.select(this.state.selected + 1)
  }

  selectPrevious(): void {
    this.select(this.state.selected - 1)
  }

  current(): ReviewItem | null {
    return this.state.items[this.state.selected] ?? null
  }

  /** Record a decision for the current item. Optimistically updates progress
   * and the item, then reconciles with the acknowledged server progress; on
   * failure the decision joins the retry queue and is never dropped. */
  async decide(label: string, note?: string): Promise<void> {
    const item = this.current()
    if (!item) return
    const request: DecisionRequest = {
      diff_id: item.diff_id,
      chosen_label: label,
      chooser: this.chooser,
      note: note ?? null,
    }
    const wasDecided = item.decision !== null
    item.decision = {
      chosen_label: label,
      chooser: this.chooser,
      timestamp: '(saving)',
      note: note ?? null,
    }
    if (this.state.progress && !wasDecided) {
      this.state.progress.decided += 1
      this.state.progress.remaining -= 1
    }
    this.emit()
    await this.flush(request)
  }

  /** Push one decision (and any queued ones) to the server, serially. */
  private async flush(next?: DecisionRequest): Promise<void> {
    if (next) this.state.pending.push(next)
    if (this.writing) return
    this.writing = true
    try {
      while (this.state.pending.length > 0) {
        const request = this.state.pending[0]
        try {
          const response = await this.api.postDecision(request)
          this.state.pending.shift()
          this.state.progress = response.progress
          const item = this.state.items.find((i) => i.diff_id === request.diff_id)
          if (item && item.decision) item.decision.timestamp = '(saved)'
          this.state.banner = null
          this.emit()
        } catch (err) {
          this.state.banner =
            `${this.state.pending.length} unsaved decision(s); retrying: ${String(err)}`
          this.emit()
          break // leave the queue intact for retry()
        }
      }
    } finally {
      this.writing = false
    }
  }

  async retry(): Promise<void> {
    await this.flush()
  }

  /** Decide the current item and move on to the next undecided one. */
  async decideAndAdvance(label: string): Promise<void> {
    await this.decide(label)
    const from = this.state.selected + 1
    for (let i = from; i < this.state.items.length; i++) {
      if (this.state.items[i].decision === null) {
        this.select(i)
        return
      }
    }
    this.selectNext()
  }
}

import { ApiClient } from './api'
import { candidateLabels, el, renderContext, typeClass } from './render'
import { QueueStore } from './store'
import { LABEL_PATTERN, type ReviewItem } from './types'

export interface AppOptions {
  baseUrl?: string
  chooser?: string
  fetchFn?: typeof fetch
  /** custom-label input hook, overridable for tests (default window.prompt) */
  promptFn?: (message: string) => string | null
}

/** The whole single-page app: review queue, detail pane, progress panel. */
export class App {
  readonly api: ApiClient
  readonly store: QueueStore
  private readonly promptFn: (message: string) => string | null
  private root: HTMLElement | null = null
  private keyHandler = (event: KeyboardEvent) => this.onKey(event)

  constructor(options: AppOptions = {}) {
    this.api = new ApiClient(options.baseUrl ?? '', options.fetchFn)
    this.store = new QueueStore(this.api, options.chooser ?? 'adjudicator')
    this.promptFn = options.promptFn ?? ((msg) => window.prompt(msg))
    this.store.subscribe(() => this.render())
  }

  async mount(root: HTMLElement): Promise<void> {
    this.root = root
    document.addEventListener('keydown', this.keyHandler)
    await this.store.load()
  }

  unmount(): void {
    document.removeEventListener('keydown', this.keyHandler)
    if (this.root) this.root.replaceChildren()
    this.root = null
  }

  private onKey(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null
    if (target && (target.tagName === 'INPUT' || target.tagName === 'TEXTAREA')) return
    const item = this.store.current()
    if (event.key >= '1' && event.key <= '9') {
      if (!item) return
      const candidates = candidateLabels(item)
      const pick = candidates[Number(event.key) - 1]
      if (pick !== undefined) void this.store.decideAndAdvance(pick)
      event.preventDefault()
    } else if (event.key === 'c') {
      if (!item) return
      const raw = this.promptFn('custom label (O, B-TYPE, or I-TYPE):')
      if (raw === null) return
      const label = raw.trim().toUpperCase()
      if (LABEL_PATTERN.test(label)) void this.store.decideAndAdvance(label)
      event.preventDefault()
    } else if (event.key === 'n' || event.key === 'j' || event.key === 'ArrowDown') {
      this.store.selectNext()
      event.preventDefault()
    } else if (event.key === 'p' || event.key === 'k' || event.key === 'ArrowUp') {
      this.store.selectPrevious()
      event.preventDefault()
    } else if (event.key === 'u') {
      void this.store.toggleUndecided()
      event.preventDefault()
    }
  }

  private render(): void {
    if (!this.root) return
    const state = this.store.state
    const root = this.root
    root.replaceChildren()

    if (state.banner) {
      const banner = el('div', 'banner', state.banner, ' ')
      const retryButton = el('button', 'retry', 'retry now')
      retryButton.addEventListener('click', () => void this.store.retry())
      banner.append(retryButton)
      root.append(banner)
    }

    root.append(this.renderProgress())

    if (state.items.length === 0) {
      const message = state.undecidedOnly && (state.progress?.decided ?? 0) > 0
        ? 'all adjudicated'
        : 'no disagreements loaded'
      root.append(el('div', 'empty-state', message))
      return
    }

    const layout = el('div', 'layout')
    layout.append(this.renderQueue())
    const item = this.store.current()
    if (item) layout.append(this.renderDetail(item))
    root.append(layout)
    root.append(
      el('div', 'help',
         'keys: 1-9 pick label, c custom, n/p move, u undecided filter'),
    )
  }

  private renderProgress(): HTMLElement {
    const progress = this.store.state.progress
    const panel = el('div', 'progress-panel')
    if (!progress) return panel
    panel.append(
      el('span', 'progress-counts',
         `${progress.decided} / ${progress.total} decided, ${progress.remaining} remaining`),
    )
    const stats = (progress as { per_version_stats?: import('./types').VersionStats })
      .per_version_stats
    if (stats && stats.decided > 0) {
      const rates = el('span', 'win-rates')
      for (const [name, row] of Object.entries(stats.per_version)) {
        rates.append(el('span', 'win-rate', `${name}: ${row.percent.toFixed(2)}%`))
      }
      rates.append(el('span', 'win-rate', `neither: ${stats.neither.percent.toFixed(2)}%`))
      panel.append(rates)
    }
    return panel
  }

  private renderQueue(): HTMLElement {
    const state = this.store.state
    const list = el('ul', 'queue')
    state.items.forEach((item, index) => {
      const entry = el('li', index === state.selected ? 'queue-item selected' : 'queue-item')
      entry.dataset.diffId = item.diff_id
      entry.append(el('span', 'queue-surface', item.surface))
      const labels = Object.values(item.labels).join(' vs ')
      entry.append(el('span', 'queue-labels', labels))
      if (item.decision) {
        entry.append(el('span', 'queue-decided', `-> ${item.decision.chosen_label}`))
      }
      entry.addEventListener('click', () => this.store.select(index))
      list.append(entry)
    })
    return list
  }

  private renderDetail(item: ReviewItem): HTMLElement {
    const pane = el('div', 'detail')
    pane.append(
      el('div', 'detail-header',
         `doc ${item.doc_index}, sentence ${item.sentence_index}, token ${item.token_index}: `,
         el('strong', 'disputed', item.surface)),
    )
    pane.append(renderContext(item))

    const choices = el('div', 'choices')
    candidateLabels(item).forEach((label, i) => {
      const button = el('button', 'choice', `${i + 1} `, labelBadge(label))
      button.addEventListener('click', () => void this.store.decideAndAdvance(label))
      choices.append(button)
    })
    pane.append(choices)

    if (item.decision) {
      pane.append(
        el('div', 'existing-decision',
           `decided: ${item.decision.chosen_label} by ${item.decision.chooser} `,
           el('span', 'timestamp', item.decision.timestamp)),
      )
    }
    return pane
  }
}

function labelBadge(label: string): HTMLElement {
  const badge = el('span', 'label', label)
  if (label !== 'O') badge.classList.add(typeClass(label.slice(2)))
  return badge
}

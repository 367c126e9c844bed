import type { ContextToken, ReviewItem } from './types'

/** DOM helper: el('div', 'cls', child, child, ...) */
export function el(
  tag: string,
  className = '',
  ...children: Array<Node | string>
): HTMLElement {
  const node = document.createElement(tag)
  if (className) node.className = className
  for (const child of children) node.append(child)
  return node
}

const KNOWN_TYPES = ['PER', 'ORG', 'LOC', 'MISC']

export function typeClass(entityType: string): string {
  if (KNOWN_TYPES.includes(entityType)) return `etype-${entityType.toLowerCase()}`
  return 'etype-other'
}

interface Span {
  start: number
  end: number // exclusive
  entityType: string
}

/** Read maximal mention spans out of one version's labels over the context
 * tokens, using the lenient reading (an I in a fresh position starts a span)
 * so truncated context windows still render sensibly. */
export function spansOf(labels: Array<string | undefined>): Span[] {
  const spans: Span[] = []
  let open: Span | null = null
  labels.forEach((label, i) => {
    const kind = label === undefined || label === 'O' ? 'O' : label[0]
    const etype = kind === 'O' ? '' : (label as string).slice(2)
    const continues = open !== null && kind === 'I' && open.entityType === etype
    if (continues) {
      ;(open as Span).end = i + 1
      return
    }
    if (open) spans.push(open)
    open = kind === 'O' ? null : { start: i, end: i + 1, entityType: etype }
  })
  if (open) spans.push(open)
  return spans
}

/** One row per version: the sentence context with mention spans bracketed,
 * entity types colored, and the disputed token emphasized. */
export function renderContext(item: ReviewItem): HTMLElement {
  const container = el('div', 'context')
  const versions = Object.keys(item.labels)

  const surfaceRow = el('div', 'context-row context-surfaces')
  surfaceRow.append(el('span', 'version-name', ''))
  item.context.forEach((token: ContextToken, i: number) => {
    const cls = i === item.context_offset ? 'token disputed' : 'token'
    surfaceRow.append(el('span', cls, token.surface))
  })
  container.append(surfaceRow)

  for (const version of versions) {
    const row = el('div', 'context-row')
    row.append(el('span', 'version-name', version))
    const labels = item.context.map((t) => t.labels[version])
    const spans = spansOf(labels)
    const startsAt = new Map(spans.map((s) => [s.start, s]))
    const endsAt = new Map(spans.map((s) => [s.end - 1, s]))
    item.context.forEach((token, i) => {
      const label = labels[i] ?? '?'
      const cell = el('span', 'token')
      if (startsAt.has(i)) cell.append(el('span', 'bracket', '['))
      const tag = el('span', 'label', label)
      if (label !== 'O' && label !== '?') tag.classList.add(typeClass(label.slice(2)))
      if (i === item.context_offset) tag.classList.add('disputed')
      cell.append(tag)
      const ending = endsAt.get(i)
      if (ending) cell.append(el('span', `bracket ${typeClass(ending.entityType)}`, `]${ending.entityType}`))
      row.append(cell)
    })
    container.append(row)
  }
  return container
}

/** The candidate labels a digit key can pick: each version's label, deduped,
 * in version order. */
export function candidateLabels(item: ReviewItem): string[] {
  const seen = new Set<string>()
  const out: string[] = []
  for (const label of Object.values(item.labels)) {
    if (!seen.has(label)) {
      seen.add(label)
      out.push(label)
    }
  }
  return out
}

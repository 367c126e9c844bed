import type { ReviewItem } from '../src/types'

export function makeItem(i: number, overrides: Partial<ReviewItem> = {}): ReviewItem {
  const id = i.toString(16).padStart(16, '0')
  return {
    diff_id: id,
    doc_index: Math.floor(i / 10),
    sentence_index: 0,
    token_index: i % 10,
    surface: `tok${i}`,
    labels: { gold: 'B-LOC', fixed: 'B-ORG' },
    context: [
      { surface: 'the', labels: { gold: 'O', fixed: 'O' } },
      { surface: `tok${i}`, labels: { gold: 'B-LOC', fixed: 'B-ORG' } },
      { surface: 'club', labels: { gold: 'O', fixed: 'O' } },
    ],
    context_offset: 1,
    decision: null,
    ...overrides,
  }
}

export function makeItems(n: number): ReviewItem[] {
  return Array.from({ length: n }, (_, i) => makeItem(i))
}

// Render model for raw-vs-refined diff review: entries grouped by
// component with before/after cells, plus the summary counts straight from
// the service's ModelDiff payload.

import type { DiffEntry, ModelDiff } from './types'

export interface DiffRow {
  kind: DiffEntry['kind']
  fieldPath: string
  before: string
  after: string
}

export interface ComponentDiffGroup {
  component: string
  rows: DiffRow[]
  counts: Record<string, number>
}

export interface DiffViewModel {
  skillName: string
  groups: ComponentDiffGroup[]
  totalEntries: number
  empty: boolean
}

const COMPONENT_ORDER = ['task', 'methods', 'knowledge']

function cell(value: unknown): string {
  if (value === undefined || value === null) return ''
  if (typeof value === 'string') return value
  return JSON.stringify(value)
}

function componentOf(entry: DiffEntry): string {
  const head = entry.fieldPath.split('.', 1)[0].split('[', 1)[0]
  return COMPONENT_ORDER.includes(head) ? head : 'other'
}

export function buildDiffView(diff: ModelDiff): DiffViewModel {
  const groups: ComponentDiffGroup[] = []
  for (const component of COMPONENT_ORDER) {
    const rows = diff.entries
      .filter((entry) => componentOf(entry) === component)
      .map((entry) => ({
        kind: entry.kind,
        fieldPath: entry.fieldPath,
        before: cell(entry.before),
        after: cell(entry.after),
      }))
    groups.push({
      component,
      rows,
      counts: diff.summary[component] ?? { added: 0, removed: 0, modified: 0 },
    })
  }
  return {
    skillName: diff.skillName,
    groups,
    totalEntries: diff.entries.length,
    empty: diff.entries.length === 0,
  }
}

// Metric panel render model.
//
// Figures are shown byte-exactly as the service sent them: each row's
// display string is the number lexeme extracted from the raw response, not
// a reformatted double. Deltas (when a PUT response carries them) follow
// the same rule.

import { displayNumber, numberLexemes, type LexemeMap } from './rawjson'
import type { StaticReport } from './types'

export interface MetricRow {
  key: string
  label: string
  display: string
  delta: string | null
}

const METRIC_LABELS: [string, string][] = [
  ['alignmentScore', 'Instructional Alignment'],
  ['tmBinding', 'Task-Method Binding'],
  ['mkBinding', 'Method-Knowledge Binding'],
  ['tkBinding', 'Task-Knowledge Binding'],
  ['guardLogic', 'Guard Logic'],
  ['failureModeling', 'Failure Modeling'],
  ['hierarchyDepth', 'Hierarchy Depth'],
]

export interface MetricPanel {
  rows: MetricRow[]
  stale: boolean
}

/**
 * @param report parsed report (used only for presence checks)
 * @param raw the raw response text the report was parsed from
 * @param prefix JSON path prefix of the report inside the response
 *               ("" for analyze responses, "static" inside PUT responses)
 */
export function buildMetricPanel(
  report: StaticReport,
  raw: string,
  stale: boolean,
  prefix = '',
  deltaPrefix: string | null = null,
): MetricPanel {
  const lexemes: LexemeMap = numberLexemes(raw)
  const rows: MetricRow[] = METRIC_LABELS.map(([key, label]) => {
    const path = prefix ? `${prefix}.${key}` : key
    const value = (report as unknown as Record<string, unknown>)[key]
    const display = value === null ? 'n/a' : displayNumber(lexemes, path)
    const delta = deltaPrefix ? lexemes.get(`${deltaPrefix}.${key}`) ?? null : null
    return { key, label, display, delta }
  })
  return { rows, stale }
}

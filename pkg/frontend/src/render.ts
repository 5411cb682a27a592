// HTML/SVG string rendering for the render models. Kept free of DOM APIs
// so every view is testable in plain node; app.ts assigns the strings to
// innerHTML.

import type { DiffViewModel } from './diffView'
import type { FsmGraph } from './fsmGraph'
import type { MetricPanel } from './metrics'
import type { TreeView } from './tree'
import type { ValidationReport } from './types'

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
}

const NODE_WIDTH = 150
const NODE_HEIGHT = 44

export function renderFsmSvg(graph: FsmGraph): string {
  const parts: string[] = [
    `<svg class="fsm" viewBox="0 0 ${graph.width} ${graph.height}" xmlns="http://www.w3.org/2000/svg">`,
  ]
  const centers = new Map(graph.nodes.map((n) => [n.name, n]))
  for (const edge of graph.edges) {
    const from = centers.get(edge.from)
    const to = centers.get(edge.to)
    if (!from || !to) continue
    const label = escapeHtml(edge.label)
    if (edge.selfLoop) {
      const cx = from.x + NODE_WIDTH / 2
      parts.push(
        `<path class="edge edge-loop" d="M ${cx} ${from.y} C ${cx + 60} ${from.y - 50}, ` +
          `${cx - 60} ${from.y - 50}, ${cx} ${from.y}" fill="none"/>`,
        `<text class="edge-label" x="${cx}" y="${from.y - 40}">${label}</text>`,
      )
      continue
    }
    const x1 = from.x + NODE_WIDTH
    const y1 = from.y + NODE_HEIGHT / 2
    const x2 = to.x
    const y2 = to.y + NODE_HEIGHT / 2
    parts.push(
      `<line class="edge" x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}"/>`,
      `<text class="edge-label" x="${(x1 + x2) / 2}" y="${(y1 + y2) / 2 - 6}">${label}</text>`,
    )
  }
  for (const node of graph.nodes) {
    const classes = node.classes.join(' ')
    parts.push(
      `<g class="${classes}" data-state="${escapeHtml(node.name)}">`,
      `<rect x="${node.x}" y="${node.y}" width="${NODE_WIDTH}" height="${NODE_HEIGHT}" rx="8"/>`,
      `<text x="${node.x + NODE_WIDTH / 2}" y="${node.y + 20}" text-anchor="middle">` +
        `${escapeHtml(node.name)}</text>`,
    )
    if (node.invokes) {
      parts.push(
        `<text class="invokes" x="${node.x + NODE_WIDTH / 2}" y="${node.y + 36}" ` +
          `text-anchor="middle">${escapeHtml(node.invokes)}</text>`,
      )
    }
    if (node.unreachable) {
      parts.push(
        `<title>unreachable from ${escapeHtml(graph.startState)}</title>`,
      )
    }
    parts.push('</g>')
  }
  parts.push('</svg>')
  return parts.join('')
}

export function renderMetricPanel(panel: MetricPanel): string {
  const rows = panel.rows
    .map((row) => {
      const delta = row.delta === null ? '' : `<td class="delta">${escapeHtml(row.delta)}</td>`
      return (
        `<tr data-metric="${row.key}"><td>${escapeHtml(row.label)}</td>` +
        `<td class="value">${escapeHtml(row.display)}</td>${delta}</tr>`
      )
    })
    .join('')
  const staleClass = panel.stale ? ' metrics-stale' : ''
  const staleBanner = panel.stale
    ? '<div class="stale-banner">metrics are stale: buffer has unsaved edits</div>'
    : ''
  return `<div class="metrics${staleClass}">${staleBanner}<table>${rows}</table></div>`
}

export function renderTree(view: TreeView): string {
  const rows = view.rows
    .map((row) => {
      const annotation = row.annotation ? ` <em>(${escapeHtml(row.annotation)})</em>` : ''
      return (
        `<li class="tree-${row.kind}" style="margin-left:${row.depth * 16}px">` +
        `<span class="kind">${row.kind}</span> ${escapeHtml(row.name)}${annotation}</li>`
      )
    })
    .join('')
  return (
    `<div class="tree"><span class="depth-badge">depth ${escapeHtml(view.depthBadge)}</span>` +
    `<ul>${rows}</ul></div>`
  )
}

export function renderDiff(view: DiffViewModel): string {
  if (view.empty) {
    return '<div class="diff diff-empty">no changes</div>'
  }
  const sections = view.groups
    .filter((group) => group.rows.length > 0)
    .map((group) => {
      const rows = group.rows
        .map(
          (row) =>
            `<tr class="diff-${row.kind}"><td>${row.kind}</td>` +
            `<td><code>${escapeHtml(row.fieldPath)}</code></td>` +
            `<td>${escapeHtml(row.before)}</td><td>${escapeHtml(row.after)}</td></tr>`,
        )
        .join('')
      const counts = `${group.counts['added'] ?? 0} added, ` +
        `${group.counts['removed'] ?? 0} removed, ${group.counts['modified'] ?? 0} modified`
      return (
        `<section><h3>${group.component} <small>${counts}</small></h3>` +
        `<table><thead><tr><th>kind</th><th>field</th><th>before</th><th>after</th></tr>` +
        `</thead><tbody>${rows}</tbody></table></section>`
      )
    })
    .join('')
  return `<div class="diff">${sections}</div>`
}

export function renderValidation(report: ValidationReport | null): string {
  if (!report) return '<div class="validation">not validated yet</div>'
  if (report.valid && report.violations.length === 0) {
    return '<div class="validation validation-ok">valid: no violations</div>'
  }
  const rows = report.violations
    .map(
      (violation) =>
        `<tr class="severity-${violation.severity}"><td>${violation.severity}</td>` +
        `<td>${escapeHtml(violation.code)}</td><td><code>${escapeHtml(violation.path)}</code></td>` +
        `<td>${escapeHtml(violation.message)}</td></tr>`,
    )
    .join('')
  const cls = report.valid ? 'validation-warnings' : 'validation-errors'
  return `<div class="validation ${cls}"><table>${rows}</table></div>`
}

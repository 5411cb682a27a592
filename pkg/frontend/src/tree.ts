// Render model for the task-method decomposition tree.
//
// The tree itself comes from the service's analyze response
// (perItemDetails.hierarchy.tree); this module only turns it into
// indented display rows and attaches the depth badge from the same
// response. Nothing is recomputed client-side.

import type { DecompositionNode, StaticReport } from './types'

export interface TreeRow {
  depth: number
  kind: string
  name: string
  annotation: string | null
}

export interface TreeView {
  rows: TreeRow[]
  depthBadge: string
  warnings: string[]
}

function walk(node: DecompositionNode, depth: number, rows: TreeRow[]): void {
  rows.push({
    depth,
    kind: node.kind,
    name: node.name,
    annotation: node.annotation ?? null,
  })
  for (const child of node.children) {
    walk(child, depth + 1, rows)
  }
}

export function buildTreeView(report: StaticReport, reportLexeme: string): TreeView {
  const hierarchy = report.perItemDetails.hierarchy
  const rows: TreeRow[] = []
  if (hierarchy) {
    walk(hierarchy.tree, 0, rows)
  }
  return {
    rows,
    depthBadge: reportLexeme,
    warnings: hierarchy?.warnings ?? [],
  }
}

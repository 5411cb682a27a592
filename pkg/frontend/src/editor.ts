// Schema-aware field editor rows.
//
// The bundle is flattened into editable (fieldPath, value) rows grouped by
// component, matching the path syntax the service accepts in PUT edits
// ("methods[name=X].organizer.transitions[0].dataCondition"). Text leaves
// are editable; structural values get a raw-JSON fallback row.

export interface FieldRow {
  component: string
  fieldPath: string
  value: string
  editable: boolean
  group: string
}

function groupOf(path: string): string {
  const afterComponent = path.split('.').slice(1).join('.')
  const head = afterComponent.split('.', 1)[0] ?? ''
  return head.split('[', 1)[0] || 'root'
}

function methodSelector(method: Record<string, unknown>, index: number): string {
  const name = method['name']
  return typeof name === 'string' && name.length > 0 ? `[name=${name}]` : `[${index}]`
}

function flatten(
  value: unknown,
  component: string,
  path: string,
  rows: FieldRow[],
): void {
  if (Array.isArray(value)) {
    value.forEach((item, index) => flatten(item, component, `${path}[${index}]`, rows))
    return
  }
  if (value !== null && typeof value === 'object') {
    for (const [key, item] of Object.entries(value as Record<string, unknown>)) {
      flatten(item, component, path ? `${path}.${key}` : key, rows)
    }
    return
  }
  rows.push({
    component,
    fieldPath: path,
    value: typeof value === 'string' ? value : JSON.stringify(value),
    editable: typeof value === 'string',
    group: groupOf(path),
  })
}

export function buildFieldRows(
  task: Record<string, unknown>,
  methods: Record<string, unknown>[],
  knowledge: Record<string, unknown>,
): FieldRow[] {
  const rows: FieldRow[] = []
  flatten(task, 'task', 'task', rows)
  methods.forEach((method, index) =>
    flatten(method, 'methods', `methods${methodSelector(method, index)}`, rows),
  )
  flatten(knowledge, 'knowledge', 'knowledge', rows)
  return rows
}

/** PUT payload for one changed row. */
export function editPayload(row: FieldRow, newValue: string): { fieldPath: string; value: string } {
  return { fieldPath: row.fieldPath, value: newValue }
}

// Workbench state: which version is loaded, what the editor buffer holds,
// and whether the figures on screen still correspond to that buffer.
//
// Invariants maintained here:
//  - a buffer that diverges from the loaded server version is marked dirty;
//  - validation/metrics shown always correspond to the displayed buffer or
//    are marked stale until the next server response arrives.

import type { StaticReport, UpdateWorkingResponse, ValidationReport } from './types'

export interface BufferEdit {
  fieldPath: string
  before: unknown
  value: unknown
}

export interface WorkbenchState {
  skill: string | null
  token: number | null
  label: string | null
  edits: BufferEdit[]
  validation: ValidationReport | null
  validationRaw: string | null
  metrics: StaticReport | null
  metricsRaw: string | null
  metricsStale: boolean
  conflict: boolean
  error: string | null
}

export function initialState(): WorkbenchState {
  return {
    skill: null,
    token: null,
    label: null,
    edits: [],
    validation: null,
    validationRaw: null,
    metrics: null,
    metricsRaw: null,
    metricsStale: false,
    conflict: false,
    error: null,
  }
}

export function isDirty(state: WorkbenchState): boolean {
  return state.edits.length > 0
}

export function modelLoaded(
  state: WorkbenchState,
  skill: string,
  token: number,
  label: string,
  validation: ValidationReport,
  validationRaw: string,
): WorkbenchState {
  return {
    ...initialState(),
    skill,
    token,
    label,
    validation,
    validationRaw,
  }
}

export function metricsLoaded(
  state: WorkbenchState,
  metrics: StaticReport,
  metricsRaw: string,
): WorkbenchState {
  return { ...state, metrics, metricsRaw, metricsStale: isDirty(state) }
}

/** Buffer edit: marks the state dirty and all server-derived figures stale. */
export function fieldEdited(
  state: WorkbenchState,
  fieldPath: string,
  before: unknown,
  value: unknown,
): WorkbenchState {
  const edits = state.edits.filter((edit) => edit.fieldPath !== fieldPath)
  edits.push({ fieldPath, before, value })
  return { ...state, edits, metricsStale: true }
}

/** Successful PUT: server accepted the buffer; figures are fresh again. */
export function updateCommitted(
  state: WorkbenchState,
  response: UpdateWorkingResponse,
  raw: string,
): WorkbenchState {
  return {
    ...state,
    token: response.token,
    label: 'working',
    edits: [],
    validation: response.validation,
    validationRaw: raw,
    metrics: response.static,
    metricsRaw: raw,
    metricsStale: false,
    conflict: false,
    error: null,
  }
}

/** 400 with a validation report: buffer stays dirty, violations shown. */
export function updateRejected(
  state: WorkbenchState,
  validation: ValidationReport,
  raw: string,
): WorkbenchState {
  return { ...state, validation, validationRaw: raw, metricsStale: true }
}

/** 409: someone else moved the head; buffer preserved for the user. */
export function conflictDetected(state: WorkbenchState): WorkbenchState {
  return { ...state, conflict: true }
}

/** Network failure: keep the buffer dirty and editable. */
export function requestFailed(state: WorkbenchState, message: string): WorkbenchState {
  return { ...state, error: message }
}

export function violationsAt(state: WorkbenchState, fieldPath: string): string[] {
  if (!state.validation) return []
  const pointer = `/${fieldPath.replace(/\./g, '/').replace(/\[(\d+)\]/g, '/$1')}`
  return state.validation.violations
    .filter((violation) => violation.path === pointer || violation.path.startsWith(pointer))
    .map((violation) => violation.code)
}

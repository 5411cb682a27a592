// Browser bootstrap: wires the render models to the DOM and the service.
// All logic lives in the imported modules; this file only moves strings.

import { ApiError, WorkbenchApi } from './api'
import { buildDiffView } from './diffView'
import { buildFieldRows } from './editor'
import { buildFsmGraph } from './fsmGraph'
import { buildMetricPanel } from './metrics'
import { displayNumber, numberLexemes } from './rawjson'
import {
  conflictDetected,
  fieldEdited,
  initialState,
  isDirty,
  metricsLoaded,
  modelLoaded,
  requestFailed,
  updateCommitted,
  updateRejected,
  type WorkbenchState,
} from './state'
import { buildTreeView } from './tree'
import {
  escapeHtml,
  renderDiff,
  renderFsmSvg,
  renderMetricPanel,
  renderTree,
  renderValidation,
} from './render'
import type { ModelResponse } from './types'

const serviceBase =
  new URLSearchParams(window.location.search).get('service') ?? 'http://127.0.0.1:8000'
const api = new WorkbenchApi(serviceBase)

let state: WorkbenchState = initialState()
let model: ModelResponse | null = null
let lastAnalyzeRaw = ''
let lastMetricsPrefix = ''
let lastDeltaPrefix: string | null = null

function element(id: string): HTMLElement {
  const found = document.getElementById(id)
  if (!found) throw new Error(`missing element #${id}`)
  return found
}

function renderAll(): void {
  element('status').innerHTML = model
    ? `<b>${escapeHtml(model.skillName)}</b> &mdash; version ${state.token} ` +
      `(${escapeHtml(state.label ?? '')})${isDirty(state) ? ' &mdash; <em>dirty</em>' : ''}` +
      `${state.conflict ? ' &mdash; <strong class="conflict">conflict: reload needed</strong>' : ''}` +
      `${state.error ? ` &mdash; <strong class="error">${escapeHtml(state.error)}</strong>` : ''}`
    : 'no model loaded'
  element('validation').innerHTML = renderValidation(state.validation)
  if (state.metrics && state.metricsRaw) {
    const panel = buildMetricPanel(
      state.metrics, state.metricsRaw, state.metricsStale, lastMetricsPrefix, lastDeltaPrefix,
    )
    element('metrics').innerHTML = renderMetricPanel(panel)
    const depth = displayNumber(
      numberLexemes(state.metricsRaw),
      lastMetricsPrefix ? `${lastMetricsPrefix}.hierarchyDepth` : 'hierarchyDepth',
    )
    element('tree').innerHTML = renderTree(buildTreeView(state.metrics, depth))
  }
  if (model) {
    const organizer = model.methods[0]?.organizer
    element('fsm').innerHTML = organizer
      ? renderFsmSvg(buildFsmGraph(organizer))
      : '<p>this method has no organizer</p>'
    renderEditor()
  }
}

function renderEditor(): void {
  if (!model) return
  const rows = buildFieldRows(model.task, model.methods, model.knowledge)
  const html = rows
    .map((row, index) => {
      const input = row.editable
        ? `<input data-row="${index}" value="${escapeHtml(row.value)}"/>`
        : `<code>${escapeHtml(row.value)}</code>`
      return (
        `<tr><td><code>${escapeHtml(row.fieldPath)}</code></td><td>${input}</td></tr>`
      )
    })
    .join('')
  element('editor').innerHTML = `<table>${html}</table>`
  element('editor')
    .querySelectorAll('input')
    .forEach((input) => {
      input.addEventListener('change', () => {
        const row = rows[Number(input.dataset['row'])]
        state = fieldEdited(state, row.fieldPath, row.value, input.value)
        renderAll()
      })
    })
}

async function loadModel(skill: string): Promise<void> {
  try {
    const fetched = await api.getModel(skill)
    model = fetched.body
    state = modelLoaded(
      state, skill, fetched.body.token, fetched.body.label,
      fetched.body.validation, fetched.raw,
    )
    const analysis = await api.analyze(skill)
    lastAnalyzeRaw = analysis.raw
    lastMetricsPrefix = ''
    lastDeltaPrefix = null
    state = metricsLoaded(state, analysis.body, lastAnalyzeRaw)
  } catch (error) {
    state = requestFailed(state, error instanceof Error ? error.message : String(error))
  }
  renderAll()
}

async function saveEdits(): Promise<void> {
  if (!model || !state.skill || state.token === null || !isDirty(state)) return
  try {
    const response = await api.updateWorking(
      state.skill,
      state.token,
      state.edits.map((edit) => ({ fieldPath: edit.fieldPath, value: edit.value })),
    )
    state = updateCommitted(state, response.body, response.raw)
    lastMetricsPrefix = 'static'
    lastDeltaPrefix = 'staticDelta'
    await loadCurrentModelDocument()
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      state = conflictDetected(state)
    } else if (error instanceof ApiError && error.validationReport()) {
      state = updateRejected(state, error.validationReport()!, error.raw)
    } else {
      state = requestFailed(state, error instanceof Error ? error.message : String(error))
    }
  }
  renderAll()
}

async function loadCurrentModelDocument(): Promise<void> {
  if (!state.skill) return
  const fetched = await api.getModel(state.skill)
  model = fetched.body
}

async function showDiff(): Promise<void> {
  if (!state.skill) return
  try {
    const diff = await api.diff(state.skill, 'raw', 'working')
    element('diff').innerHTML = renderDiff(buildDiffView(diff.body))
  } catch (error) {
    element('diff').innerHTML = `<p class="error">${escapeHtml(String(error))}</p>`
  }
}

export function start(): void {
  element('load').addEventListener('click', () => {
    const skill = (element('skill') as HTMLInputElement).value.trim()
    if (skill) void loadModel(skill)
  })
  element('save').addEventListener('click', () => void saveEdits())
  element('show-diff').addEventListener('click', () => void showDiff())
}

start()

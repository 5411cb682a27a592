// Render model for a method's finite-state machine.
//
// Pure layout: states become nodes placed on layers by distance from the
// start state, transitions become labeled edges. Done/Fail states carry
// distinct style classes; states with no path from the start are flagged
// unreachable. No figures are computed here, only presentation structure.

import type { OrganizerDoc, StateDoc } from './types'

export interface GraphNode {
  name: string
  x: number
  y: number
  classes: string[]
  invokes: string | null
  unreachable: boolean
}

export interface GraphEdge {
  from: string
  to: string
  label: string
  selfLoop: boolean
}

export interface FsmGraph {
  nodes: GraphNode[]
  edges: GraphEdge[]
  width: number
  height: number
  startState: string
}

const LAYER_WIDTH = 200
const ROW_HEIGHT = 96
const MARGIN = 60

function isDoneState(name: string): boolean {
  return name === 'Done' || name.endsWith('_Done')
}

function isFailState(state: StateDoc): boolean {
  if (state.name === 'Fail' || state.name.endsWith('_Fail')) return true
  return state.goalInvocation?.goalReference === 'FailureGoal'
}

function reachableFrom(organizer: OrganizerDoc): Set<string> {
  const edges = new Map<string, string[]>()
  for (const transition of organizer.transitions) {
    if (transition.dataCondition?.trim() === 'false') continue
    const targets = edges.get(transition.sourceState) ?? []
    targets.push(transition.targetState)
    edges.set(transition.sourceState, targets)
  }
  const reachable = new Set<string>()
  const frontier = [organizer.startState]
  while (frontier.length > 0) {
    const name = frontier.pop()!
    if (reachable.has(name)) continue
    reachable.add(name)
    for (const target of edges.get(name) ?? []) {
      if (!reachable.has(target)) frontier.push(target)
    }
  }
  return reachable
}

function layerOf(organizer: OrganizerDoc): Map<string, number> {
  const layers = new Map<string, number>()
  layers.set(organizer.startState, 0)
  let frontier = [organizer.startState]
  while (frontier.length > 0) {
    const next: string[] = []
    for (const name of frontier) {
      const layer = layers.get(name)!
      for (const transition of organizer.transitions) {
        if (transition.sourceState !== name) continue
        if (!layers.has(transition.targetState)) {
          layers.set(transition.targetState, layer + 1)
          next.push(transition.targetState)
        }
      }
    }
    frontier = next
  }
  // States with no path from the start go on a trailing layer.
  const fallback = Math.max(0, ...layers.values()) + 1
  for (const state of organizer.states) {
    if (!layers.has(state.name)) layers.set(state.name, fallback)
  }
  return layers
}

export function buildFsmGraph(organizer: OrganizerDoc): FsmGraph {
  const layers = layerOf(organizer)
  const reachable = reachableFrom(organizer)

  const byLayer = new Map<number, StateDoc[]>()
  for (const state of organizer.states) {
    const layer = layers.get(state.name)!
    const group = byLayer.get(layer) ?? []
    group.push(state)
    byLayer.set(layer, group)
  }

  const nodes: GraphNode[] = []
  for (const state of organizer.states) {
    const layer = layers.get(state.name)!
    const row = byLayer.get(layer)!.indexOf(state)
    const classes = ['state']
    if (state.name === organizer.startState) classes.push('state-start')
    if (isDoneState(state.name)) classes.push('state-done')
    if (isFailState(state)) classes.push('state-fail')
    const unreachable = !reachable.has(state.name)
    if (unreachable) classes.push('state-unreachable')
    nodes.push({
      name: state.name,
      x: MARGIN + layer * LAYER_WIDTH,
      y: MARGIN + row * ROW_HEIGHT,
      classes,
      invokes: state.goalInvocation?.goalReference ?? null,
      unreachable,
    })
  }

  const edges: GraphEdge[] = organizer.transitions.map((transition) => ({
    from: transition.sourceState,
    to: transition.targetState,
    label: transition.dataCondition ?? '',
    selfLoop: transition.sourceState === transition.targetState,
  }))

  const maxLayer = Math.max(0, ...layers.values())
  const maxRows = Math.max(1, ...[...byLayer.values()].map((group) => group.length))
  return {
    nodes,
    edges,
    width: MARGIN * 2 + (maxLayer + 1) * LAYER_WIDTH,
    height: MARGIN * 2 + maxRows * ROW_HEIGHT,
    startState: organizer.startState,
  }
}

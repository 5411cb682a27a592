import { readFileSync } from 'node:fs'
import { join } from 'node:path'
import { describe, expect, it } from 'vitest'

import { buildFsmGraph } from '../src/fsmGraph'
import { renderFsmSvg } from '../src/render'
import type { ModelResponse, OrganizerDoc } from '../src/types'

const model: ModelResponse = JSON.parse(
  readFileSync(join(__dirname, 'fixtures', 'model.json'), 'utf-8'),
)
const organizer = model.methods[0].organizer as OrganizerDoc

describe('buildFsmGraph on the sortlist fixture', () => {
  const graph = buildFsmGraph(organizer)

  it('has one node per state with done/fail styling', () => {
    expect(graph.nodes.map((n) => n.name).sort()).toEqual(
      ['SL_Done', 'SL_Fail', 'SL_Insert', 'SL_Start'],
    )
    const byName = new Map(graph.nodes.map((n) => [n.name, n]))
    expect(byName.get('SL_Done')!.classes).toContain('state-done')
    expect(byName.get('SL_Fail')!.classes).toContain('state-fail')
    expect(byName.get('SL_Start')!.classes).toContain('state-start')
    expect(byName.get('SL_Insert')!.classes).not.toContain('state-done')
    expect(byName.get('SL_Insert')!.classes).not.toContain('state-fail')
  })

  it('labels edges with their dataCondition', () => {
    const labels = graph.edges.map((e) => e.label)
    expect(labels).toContain('unsortedRemaining(unsortedList)')
    expect(labels).toContain('comparisonUndefined(unsortedList)')
    expect(graph.edges).toHaveLength(organizer.transitions.length)
  })

  it('marks self-loops', () => {
    const loop = graph.edges.find((e) => e.from === 'SL_Insert' && e.to === 'SL_Insert')
    expect(loop?.selfLoop).toBe(true)
  })

  it('layouts layers left to right from the start state', () => {
    const byName = new Map(graph.nodes.map((n) => [n.name, n]))
    expect(byName.get('SL_Start')!.x).toBeLessThan(byName.get('SL_Insert')!.x)
  })

  it('flags nothing unreachable in the conformant fixture', () => {
    expect(graph.nodes.every((n) => !n.unreachable)).toBe(true)
  })
})

describe('unreachable state flagging', () => {
  it('flags states with no path from the start', () => {
    const withOrphan: OrganizerDoc = {
      ...organizer,
      states: [...organizer.states, { name: 'SL_Orphan' }],
    }
    const graph = buildFsmGraph(withOrphan)
    const orphan = graph.nodes.find((n) => n.name === 'SL_Orphan')!
    expect(orphan.unreachable).toBe(true)
    expect(orphan.classes).toContain('state-unreachable')
  })

  it('treats literal-false guards as missing edges', () => {
    const gated: OrganizerDoc = {
      startState: 'A',
      states: [{ name: 'A' }, { name: 'B_Done' }],
      transitions: [{ sourceState: 'A', targetState: 'B_Done', dataCondition: 'false' }],
    }
    const graph = buildFsmGraph(gated)
    expect(graph.nodes.find((n) => n.name === 'B_Done')!.unreachable).toBe(true)
  })
})

describe('renderFsmSvg', () => {
  it('emits styled SVG with state classes and guard labels', () => {
    const svg = renderFsmSvg(buildFsmGraph(organizer))
    expect(svg).toContain('<svg')
    expect(svg).toContain('state-done')
    expect(svg).toContain('state-fail')
    expect(svg).toContain('unsortedRemaining(unsortedList)')
    expect(svg).toContain('data-state="SL_Start"')
  })

  it('escapes markup in names and labels', () => {
    const hostile: OrganizerDoc = {
      startState: 'A',
      states: [{ name: 'A' }, { name: 'B_Done' }],
      transitions: [
        { sourceState: 'A', targetState: 'B_Done', dataCondition: 'lt(a, b) && gt(b, a)' },
      ],
    }
    const svg = renderFsmSvg(buildFsmGraph(hostile))
    expect(svg).toContain('lt(a, b) &amp;&amp; gt(b, a)')
  })
})

// Wire types mirroring the tmkit service JSON payloads.

export interface Violation {
  code: string
  path: string
  message: string
  severity: 'error' | 'warning'
}

export interface ValidationReport {
  valid: boolean
  violations: Violation[]
}

export interface GoalInvocation {
  goalReference: string
  type: string
  actualArguments: string[]
}

export interface StateDoc {
  name: string
  goalInvocation?: GoalInvocation
  [key: string]: unknown
}

export interface TransitionDoc {
  sourceState: string
  targetState: string
  dataCondition?: string
  [key: string]: unknown
}

export interface OrganizerDoc {
  startState: string
  states: StateDoc[]
  transitions: TransitionDoc[]
  [key: string]: unknown
}

export interface MethodDoc {
  name: string
  description?: string
  organizer?: OrganizerDoc
  [key: string]: unknown
}

export interface ModelResponse {
  skillName: string
  token: number
  label: string
  createdAt: string
  task: Record<string, unknown>
  methods: MethodDoc[]
  knowledge: Record<string, unknown>
  validation: ValidationReport
}

export interface DecompositionNode {
  kind: 'task' | 'method' | 'operation'
  name: string
  annotation?: string
  children: DecompositionNode[]
}

export interface StaticReport {
  alignmentScore: number | null
  tmBinding: number
  mkBinding: number
  tkBinding: number
  guardLogic: number
  failureModeling: number
  hierarchyDepth: number
  perItemDetails: {
    hierarchy?: { tree: DecompositionNode; warnings: string[] }
    [key: string]: unknown
  }
}

export interface UpdateWorkingResponse {
  skillName: string
  token: number
  validation: ValidationReport
  static: StaticReport
  previousStatic: StaticReport
  staticDelta: Record<string, number | null>
}

export interface DiffEntry {
  kind: 'added' | 'removed' | 'modified'
  fieldPath: string
  before?: unknown
  after?: unknown
  index?: number
}

export interface ModelDiff {
  skillName: string
  entries: DiffEntry[]
  summary: Record<string, Record<string, number>>
}

export interface ErrorBody {
  code: string
  message: string
  path?: string
  validation?: ValidationReport
}

export interface SessionEndResponse {
  session: Record<string, unknown>
  reduction: number
  refinedToken: number
  diff: ModelDiff | null
}

// Typed client for the tmkit service. Every call returns both the parsed
// body and the raw response text so views can display figures byte-exactly.

import type {
  ModelDiff,
  ModelResponse,
  SessionEndResponse,
  StaticReport,
  UpdateWorkingResponse,
  ValidationReport,
} from './types'

export type FetchLike = (url: string, init?: RequestInit) => Promise<{
  status: number
  text(): Promise<string>
}>

export interface ApiResult<T> {
  status: number
  body: T
  raw: string
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly raw: string,
  ) {
    super(message)
  }

  /** The ValidationReport a 400 carries when a write was rejected, if any. */
  validationReport(): ValidationReport | null {
    try {
      const parsed = JSON.parse(this.raw) as { validation?: ValidationReport }
      return parsed.validation ?? null
    } catch {
      return null
    }
  }
}

export interface FieldEdit {
  fieldPath: string
  value: unknown
}

export class WorkbenchApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<ApiResult<T>> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    })
    const raw = await response.text()
    if (response.status >= 400) {
      let code = 'HTTP_ERROR'
      let message = `request failed with status ${response.status}`
      try {
        const parsed = JSON.parse(raw) as { code?: string; message?: string }
        code = parsed.code ?? code
        message = parsed.message ?? message
      } catch {
        // non-JSON error body; keep the defaults
      }
      throw new ApiError(response.status, code, message, raw)
    }
    return { status: response.status, body: JSON.parse(raw) as T, raw }
  }

  getModel(skill: string, version?: string): Promise<ApiResult<ModelResponse>> {
    const query = version ? `?version=${encodeURIComponent(version)}` : ''
    return this.request('GET', `/models/${encodeURIComponent(skill)}${query}`)
  }

  validate(skill: string): Promise<ApiResult<ValidationReport>> {
    return this.request('POST', `/models/${encodeURIComponent(skill)}/validate`)
  }

  analyze(skill: string, transcript?: string): Promise<ApiResult<StaticReport>> {
    return this.request('POST', `/models/${encodeURIComponent(skill)}/analyze`,
      transcript ? { transcript } : {})
  }

  updateWorking(
    skill: string,
    baseToken: number,
    edits: FieldEdit[],
  ): Promise<ApiResult<UpdateWorkingResponse>> {
    return this.request('PUT', `/models/${encodeURIComponent(skill)}/working`,
      { baseToken, edits })
  }

  diff(skill: string, fromVersion: string, toVersion: string): Promise<ApiResult<ModelDiff>> {
    return this.request('POST', `/models/${encodeURIComponent(skill)}/diff`,
      { fromVersion, toVersion })
  }

  startSession(skill: string, manualBaselineHours = 7.0): Promise<ApiResult<unknown>> {
    return this.request('POST', `/sessions/${encodeURIComponent(skill)}/start`,
      { manualBaselineHours })
  }

  endSession(skill: string, loggedHours?: number): Promise<ApiResult<SessionEndResponse>> {
    return this.request('POST', `/sessions/${encodeURIComponent(skill)}/end`,
      loggedHours === undefined ? {} : { loggedHours })
  }
}

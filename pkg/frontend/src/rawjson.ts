// Byte-exact number display.
//
// The workbench never recomputes or reformats a figure: every displayed
// number is the exact lexeme the service sent. JSON.parse would lose that
// ("1.0" parses to a double that stringifies as "1"), so this module scans
// the raw response text and records the source substring of every number,
// keyed by its JSON path ("staticDelta.guardLogic", "components.Task.overall").

export type LexemeMap = Map<string, string>

const WHITESPACE = new Set([' ', '\t', '\n', '\r'])

class Scanner {
  pos = 0
  constructor(readonly text: string) {}

  peek(): string {
    return this.text[this.pos]
  }

  skipWhitespace(): void {
    while (this.pos < this.text.length && WHITESPACE.has(this.text[this.pos])) {
      this.pos += 1
    }
  }

  expect(ch: string): void {
    if (this.text[this.pos] !== ch) {
      throw new Error(`expected '${ch}' at offset ${this.pos}`)
    }
    this.pos += 1
  }
}

function scanString(scanner: Scanner): string {
  scanner.expect('"')
  let out = ''
  while (true) {
    const ch = scanner.text[scanner.pos]
    if (ch === undefined) throw new Error('unterminated string')
    scanner.pos += 1
    if (ch === '"') return out
    if (ch === '\\') {
      const escape = scanner.text[scanner.pos]
      scanner.pos += 1
      if (escape === 'u') {
        out += String.fromCharCode(parseInt(scanner.text.slice(scanner.pos, scanner.pos + 4), 16))
        scanner.pos += 4
      } else {
        const simple: Record<string, string> = {
          '"': '"', '\\': '\\', '/': '/', b: '\b', f: '\f', n: '\n', r: '\r', t: '\t',
        }
        out += simple[escape] ?? escape
      }
    } else {
      out += ch
    }
  }
}

const NUMBER_CHARS = /[-+0-9.eE]/

function scanValue(scanner: Scanner, path: string, lexemes: LexemeMap): void {
  scanner.skipWhitespace()
  const ch = scanner.peek()
  if (ch === '{') {
    scanner.expect('{')
    scanner.skipWhitespace()
    if (scanner.peek() === '}') {
      scanner.expect('}')
      return
    }
    while (true) {
      scanner.skipWhitespace()
      const key = scanString(scanner)
      scanner.skipWhitespace()
      scanner.expect(':')
      scanValue(scanner, path ? `${path}.${key}` : key, lexemes)
      scanner.skipWhitespace()
      if (scanner.peek() === ',') {
        scanner.expect(',')
        continue
      }
      scanner.expect('}')
      return
    }
  }
  if (ch === '[') {
    scanner.expect('[')
    scanner.skipWhitespace()
    if (scanner.peek() === ']') {
      scanner.expect(']')
      return
    }
    let index = 0
    while (true) {
      scanValue(scanner, `${path}[${index}]`, lexemes)
      index += 1
      scanner.skipWhitespace()
      if (scanner.peek() === ',') {
        scanner.expect(',')
        continue
      }
      scanner.expect(']')
      return
    }
  }
  if (ch === '"') {
    scanString(scanner)
    return
  }
  if (ch === 't' || ch === 'f' || ch === 'n') {
    const word = ch === 't' ? 'true' : ch === 'f' ? 'false' : 'null'
    scanner.pos += word.length
    return
  }
  const start = scanner.pos
  while (scanner.pos < scanner.text.length && NUMBER_CHARS.test(scanner.text[scanner.pos])) {
    scanner.pos += 1
  }
  if (scanner.pos === start) throw new Error(`unexpected character at offset ${start}`)
  lexemes.set(path, scanner.text.slice(start, scanner.pos))
}

/** Source text of every number in a JSON document, keyed by JSON path. */
export function numberLexemes(rawJson: string): LexemeMap {
  const lexemes: LexemeMap = new Map()
  scanValue(new Scanner(rawJson), '', lexemes)
  return lexemes
}

/** Displayed form of one figure: the verbatim lexeme, or a fallback. */
export function displayNumber(lexemes: LexemeMap, path: string, fallback = 'n/a'): string {
  return lexemes.get(path) ?? fallback
}

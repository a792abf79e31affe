/** Extract the exact byte span of a value inside raw JSON text.
 *
 * JSON.parse followed by toString() re-formats numbers (1e-7, trailing
 * zeros, 64-bit precision edge cases), so anything the dashboard promises
 * to show byte-for-byte is looked up here instead, straight from the
 * response body.
 */

export type Path = (string | number)[];

export function rawLiteral(text: string, path: Path): string {
  const scanner = new Scanner(text);
  scanner.skipWs();
  for (const step of path) {
    if (typeof step === "string") {
      scanner.enterObjectKey(step);
    } else {
      scanner.enterArrayIndex(step);
    }
  }
  const start = scanner.position();
  scanner.skipValue();
  return text.slice(start, scanner.position());
}

/** The literal for path, with string values unquoted and undecoded checks. */
export function rawString(text: string, path: Path): string {
  const literal = rawLiteral(text, path);
  if (!literal.startsWith('"') || !literal.endsWith('"')) {
    throw new Error(`value at ${path.join(".")} is not a JSON string`);
  }
  return JSON.parse(literal) as string;
}

class Scanner {
  private pos = 0;

  constructor(private readonly text: string) {}

  position(): number {
    return this.pos;
  }

  skipWs(): void {
    while (this.pos < this.text.length && " \t\n\r".includes(this.text[this.pos]!)) {
      this.pos++;
    }
  }

  private peek(): string {
    const ch = this.text[this.pos];
    if (ch === undefined) {
      throw new Error("unexpected end of JSON text");
    }
    return ch;
  }

  private expect(ch: string): void {
    if (this.peek() !== ch) {
      throw new Error(`expected ${ch} at offset ${this.pos}, found ${this.peek()}`);
    }
    this.pos++;
  }

  /** Position inside an object's value for the given key. */
  enterObjectKey(key: string): void {
    this.skipWs();
    this.expect("{");
    this.skipWs();
    if (this.peek() === "}") {
      throw new Error(`key ${key} not found in empty object`);
    }
    for (;;) {
      const name = this.scanString();
      this.skipWs();
      this.expect(":");
      this.skipWs();
      if (name === key) {
        return;
      }
      this.skipValue();
      this.skipWs();
      if (this.peek() === ",") {
        this.pos++;
        this.skipWs();
        continue;
      }
      throw new Error(`key ${key} not found in object`);
    }
  }

  /** Position at an array's n-th element. */
  enterArrayIndex(index: number): void {
    this.skipWs();
    this.expect("[");
    this.skipWs();
    for (let i = 0; i < index; i++) {
      if (this.peek() === "]") {
        throw new Error(`array index ${index} out of range`);
      }
      this.skipValue();
      this.skipWs();
      if (this.peek() === "]") {
        throw new Error(`array index ${index} out of range`);
      }
      this.expect(",");
      this.skipWs();
    }
    if (this.peek() === "]") {
      throw new Error(`array index ${index} out of range`);
    }
  }

  /** Advance past one complete value of any type. */
  skipValue(): void {
    this.skipWs();
    const ch = this.peek();
    if (ch === '"') {
      this.scanString();
      return;
    }
    if (ch === "{" || ch === "[") {
      const close = ch === "{" ? "}" : "]";
      this.pos++;
      this.skipWs();
      if (this.peek() === close) {
        this.pos++;
        return;
      }
      for (;;) {
        if (ch === "{") {
          this.scanString();
          this.skipWs();
          this.expect(":");
        }
        this.skipValue();
        this.skipWs();
        if (this.peek() === ",") {
          this.pos++;
          this.skipWs();
          continue;
        }
        this.expect(close);
        return;
      }
    }
    const match = /^(?:-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?|true|false|null)/.exec(
      this.text.slice(this.pos)
    );
    if (match === null) {
      throw new Error(`malformed JSON value at offset ${this.pos}`);
    }
    this.pos += match[0].length;
  }

  private scanString(): string {
    const start = this.pos;
    this.expect('"');
    while (this.peek() !== '"') {
      if (this.peek() === "\\") {
        this.pos++; // the escaped character, whatever it is
      }
      this.pos++;
    }
    this.pos++;
    return JSON.parse(this.text.slice(start, this.pos)) as string;
  }
}

/** Raised when a figure spec or an input CSV violates the expected shape.
 *  The message always names the offending file (and column, when there is
 *  one) so a broken pipeline points at its own weak link. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

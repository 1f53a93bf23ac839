/** Typed errors raised by the bindings. */

/** A caller-side contract violation (bad array shape, dtype, or image key). */
export class ContractError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ContractError";
  }
}

/** Array shape/dtype mismatch; the message names the expected contract. */
export class ShapeError extends ContractError {
  constructor(message: string) {
    super(message);
    this.name = "ShapeError";
  }
}

/** The native CLI failed or could not be found. */
export class CliError extends Error {
  readonly status: number | null;
  readonly stderr: string;

  constructor(message: string, status: number | null, stderr: string) {
    super(message);
    this.name = "CliError";
    this.status = status;
    this.stderr = stderr;
  }
}

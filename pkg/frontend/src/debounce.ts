/** Trailing-edge debouncer: only the last op within the window fires. */
export class Debouncer {
  private handle: ReturnType<typeof setTimeout> | undefined;

  constructor(readonly waitMs = 300) {}

  run(op: () => void): void {
    if (this.handle !== undefined) clearTimeout(this.handle);
    this.handle = setTimeout(() => {
      this.handle = undefined;
      op();
    }, this.waitMs);
  }

  cancel(): void {
    if (this.handle !== undefined) clearTimeout(this.handle);
    this.handle = undefined;
  }

  get pending(): boolean {
    return this.handle !== undefined;
  }
}

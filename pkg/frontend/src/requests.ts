/** One logical request slot per view: starting a new request aborts the
 * previous one, and a response that lost the race is dropped rather than
 * applied over fresher data. */
export class LatestRequest {
  private ticket = 0;
  private controller: AbortController | null = null;

  /** Resolves with the result if this call is still the latest, "stale"
   * if it was superseded, or rethrows the fetcher's error. */
  async run<T>(fetcher: (signal: AbortSignal) => Promise<T>): Promise<T | "stale"> {
    const mine = ++this.ticket;
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    try {
      const result = await fetcher(controller.signal);
      return mine === this.ticket ? result : "stale";
    } catch (err) {
      if (mine !== this.ticket || (err instanceof Error && err.name === "AbortError")) {
        return "stale";
      }
      throw err;
    }
  }

  get inFlight(): boolean {
    return this.controller !== null && !this.controller.signal.aborted;
  }
}

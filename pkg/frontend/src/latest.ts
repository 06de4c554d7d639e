/** Hands out sequence tokens per request stream so a slow response for
 * a superseded query can be recognized and dropped instead of
 * overwriting newer results. */
export class RequestSequencer {
  private current = 0;

  next(): number {
    return ++this.current;
  }

  isCurrent(token: number): boolean {
    return token === this.current;
  }
}

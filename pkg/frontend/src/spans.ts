import type { ByteSpan } from "./types.js";

/** Union of possibly overlapping half-open spans; result is sorted and
 * disjoint (touching spans merge). */
export function mergeSpans(spans: readonly ByteSpan[]): ByteSpan[] {
  const sorted = [...spans].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  const out: ByteSpan[] = [];
  for (const [start, end] of sorted) {
    const last = out[out.length - 1];
    if (last && start <= last[1]) {
      last[1] = Math.max(last[1], end);
    } else {
      out.push([start, end]);
    }
  }
  return out;
}

export interface CharSpan {
  start: number;
  end: number;
}

/**
 * Maps UTF-8 byte offsets to string (UTF-16 code unit) offsets.
 *
 * The service indexes documents as bytes; the viewer works on decoded text.
 * A byte offset that lands inside a multi-byte character is widened outward
 * to the nearest character boundary.
 */
export class ByteOffsetMapper {
  /** byte offset at the start of each code point, plus the total length */
  private readonly byteStarts: number[];
  /** string index of each code point, aligned with byteStarts */
  private readonly charStarts: number[];

  constructor(text: string) {
    this.byteStarts = [];
    this.charStarts = [];
    let byteOffset = 0;
    let i = 0;
    while (i < text.length) {
      const cp = text.codePointAt(i) as number;
      this.byteStarts.push(byteOffset);
      this.charStarts.push(i);
      byteOffset += cp < 0x80 ? 1 : cp < 0x800 ? 2 : cp < 0x10000 ? 3 : 4;
      i += cp > 0xffff ? 2 : 1;
    }
    this.byteStarts.push(byteOffset);
    this.charStarts.push(text.length);
  }

  get totalBytes(): number {
    return this.byteStarts[this.byteStarts.length - 1];
  }

  /** index of the last boundary <= byteOffset */
  private floorBoundary(byteOffset: number): number {
    let lo = 0;
    let hi = this.byteStarts.length - 1;
    while (lo < hi) {
      const mid = (lo + hi + 1) >> 1;
      if (this.byteStarts[mid] <= byteOffset) lo = mid;
      else hi = mid - 1;
    }
    return lo;
  }

  /** char index for a span start: rounds down to a character boundary */
  charStart(byteOffset: number): number {
    const clamped = Math.max(0, Math.min(byteOffset, this.totalBytes));
    return this.charStarts[this.floorBoundary(clamped)];
  }

  /** char index for a span end: rounds up to a character boundary */
  charEnd(byteOffset: number): number {
    const clamped = Math.max(0, Math.min(byteOffset, this.totalBytes));
    const idx = this.floorBoundary(clamped);
    if (this.byteStarts[idx] === clamped) return this.charStarts[idx];
    return this.charStarts[Math.min(idx + 1, this.charStarts.length - 1)];
  }

  toCharSpan([start, end]: ByteSpan): CharSpan {
    return { start: this.charStart(start), end: this.charEnd(end) };
  }
}

/** Merge byte spans and convert them to disjoint, in-bounds char spans. */
export function highlightCharSpans(
  text: string,
  byteSpans: readonly ByteSpan[],
): CharSpan[] {
  const mapper = new ByteOffsetMapper(text);
  return mergeSpans(byteSpans).map((span) => mapper.toCharSpan(span));
}

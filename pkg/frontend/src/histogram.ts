// Display binning for overlaid cycle-time histograms. Pure rendering: the
// raw per-trace cycle times come from the API, and EMD numbers shown next
// to a chart always come from /evaluate, never from these bins.

export interface DisplayHistogram {
  origin: number;
  width: number;
  counts: number[];
}

export function binSeries(
  reference: number[],
  others: number[][],
  binCount = 40,
): DisplayHistogram[] {
  if (reference.length === 0) {
    throw new Error("reference series is empty");
  }
  const lo = Math.min(...reference);
  const hi = Math.max(...reference);
  const width = hi > lo ? (hi - lo) / binCount : 1;
  const all = [reference, ...others];
  // extend the range so off-reference values stay visible
  let minIdx = 0;
  let maxIdx = binCount - 1;
  for (const series of all) {
    for (const value of series) {
      const idx = Math.floor((value - lo) / width);
      minIdx = Math.min(minIdx, idx);
      maxIdx = Math.max(maxIdx, idx);
    }
  }
  return all.map((series) => {
    const counts = new Array<number>(maxIdx - minIdx + 1).fill(0);
    for (const value of series) {
      let idx = Math.floor((value - lo) / width);
      if (idx === maxIdx + 1) {
        idx = maxIdx; // inclusive right edge
      }
      counts[idx - minIdx] += 1;
    }
    return { origin: lo + minIdx * width, width, counts };
  });
}

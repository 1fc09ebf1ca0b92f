/* Pure scene construction: summaries payload in, drawable structure out.
 *
 * The client never computes statistics beyond display scaling; every
 * number in a scene traces back to the server payload, so structural
 * counts (bands, cells, polyline points) can be checked against the
 * payload directly.
 */

import { SummariesDoc, WindowSummaryDoc } from "./api.js";

export type SeriesKey = "all" | string;

export interface CellScene {
    windowIndex: number;
    start: number;
    /* per visible series: counts scaled into [0, 1] by the band peak */
    bars: Record<SeriesKey, number[]>;
}

export interface BandScene {
    feature: number;
    name: string;
    lo: number;
    hi: number;
    cells: CellScene[];
    /* per series: (cell position, mean scaled into [0, 1]) */
    polylines: Record<SeriesKey, [number, number][]>;
}

export interface PhtScene {
    bands: BandScene[];
    nWindows: number;
    series: SeriesKey[];
    span: [number, number];
    driftMarkers: number[];
}

export interface SceneOptions {
    visibleClasses: number[];
    showMeans: boolean;
    driftMarkers: number[];
}

function seriesKeys(options: SceneOptions): SeriesKey[] {
    if (options.visibleClasses.length === 0) return ["all"];
    return options.visibleClasses.map((c) => String(c));
}

function seriesCounts(w: WindowSummaryDoc, feature: number, key: SeriesKey): number[] {
    const f = w.per_feature[feature];
    return key === "all" ? f.counts : f.per_class[key].counts;
}

function seriesMean(w: WindowSummaryDoc, feature: number, key: SeriesKey): number | null {
    const f = w.per_feature[feature];
    return key === "all" ? f.mean : f.per_class[key].mean;
}

export function buildPhtScene(doc: SummariesDoc, options: SceneOptions): PhtScene {
    const windows = doc.windows;
    if (windows.length === 0) throw new Error("no windows in summaries payload");
    const series = seriesKeys(options);
    const nFeatures = windows[0].per_feature.length;

    const bands: BandScene[] = [];
    for (let feature = 0; feature < nFeatures; feature += 1) {
        const first = windows[0].per_feature[feature];
        const lo = first.edges[0];
        const hi = first.edges[first.edges.length - 1];
        const span = hi - lo || 1;

        let peak = 1;
        for (const w of windows) {
            for (const key of series) {
                for (const count of seriesCounts(w, feature, key)) {
                    peak = Math.max(peak, count);
                }
            }
        }

        const cells: CellScene[] = windows.map((w) => {
            const bars: Record<SeriesKey, number[]> = {};
            for (const key of series) {
                bars[key] = seriesCounts(w, feature, key).map((c) => c / peak);
            }
            return { windowIndex: w.window_index, start: w.start, bars };
        });

        const polylines: Record<SeriesKey, [number, number][]> = {};
        for (const key of series) {
            const points: [number, number][] = [];
            windows.forEach((w, position) => {
                const mean = seriesMean(w, feature, key);
                if (mean !== null && options.showMeans) {
                    points.push([position, (mean - lo) / span]);
                }
            });
            polylines[key] = points;
        }

        bands.push({ feature, name: first.name, lo, hi, cells, polylines });
    }

    const last = windows[windows.length - 1];
    return {
        bands,
        nWindows: windows.length,
        series,
        span: [windows[0].start, last.start + last.size],
        driftMarkers: options.driftMarkers.filter(
            (m) => m >= windows[0].start && m <= last.start + last.size,
        ),
    };
}

/* Cell pair (i, i+1) with the largest mean step, per the first series that
 * has a full polyline; this is the boundary the realigned grid isolates. */
export function boundaryJumpCellPair(scene: PhtScene): [number, number] | null {
    let best: [number, number] | null = null;
    let bestStep = -Infinity;
    for (const band of scene.bands) {
        for (const key of scene.series) {
            const points = band.polylines[key];
            if (points.length < 2) continue;
            for (let i = 0; i + 1 < points.length; i += 1) {
                const step = Math.abs(points[i + 1][1] - points[i][1]);
                if (step > bestStep) {
                    bestStep = step;
                    best = [points[i][0], points[i + 1][0]];
                }
            }
        }
    }
    return best;
}

export interface AxisScene {
    feature: number;
    name: string;
    bars: Record<SeriesKey, number[]>;
    /* highlighted fraction per bin when a brush is active (0 when none) */
    highlight: number[] | null;
}

export interface ParallelScene {
    axes: AxisScene[];
    series: SeriesKey[];
}

export function buildParallelScene(
    doc: SummariesDoc,
    windowIndex: number,
    options: SceneOptions,
): ParallelScene {
    const w = doc.windows.find((x) => x.window_index === windowIndex);
    if (!w) throw new Error(`window ${windowIndex} not in payload`);
    const series = seriesKeys(options);

    const axes: AxisScene[] = w.per_feature.map((f, feature) => {
        let peak = 1;
        for (const key of series) {
            for (const count of seriesCounts(w, feature, key)) {
                peak = Math.max(peak, count);
            }
        }
        const bars: Record<SeriesKey, number[]> = {};
        for (const key of series) {
            bars[key] = seriesCounts(w, feature, key).map((c) => c / peak);
        }
        const highlight = f.brushed_counts
            ? f.brushed_counts.map((c, i) => (f.counts[i] ? c / f.counts[i] : 0))
            : null;
        return { feature, name: f.name, bars, highlight };
    });
    return { axes, series };
}

/* Structural counts used by tests and by the status line in the UI. */
export function sceneCounts(scene: PhtScene) {
    return {
        bands: scene.bands.length,
        cellsPerBand: scene.bands.map((b) => b.cells.length),
        polylinePoints: scene.bands.map((b) =>
            Object.fromEntries(
                scene.series.map((k) => [k, b.polylines[k].length]),
            ),
        ),
    };
}

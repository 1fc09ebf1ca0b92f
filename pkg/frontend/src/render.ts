/* Scene -> SVG DOM. Thin and dumb on purpose: everything drawable was
 * decided in scene.ts, which is what the tests cover. */

import { ParallelScene, PhtScene, SeriesKey } from "./scene.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export const CLASS_PALETTE = [
    "#0072B2", "#D55E00", "#009E73", "#CC79A7",
    "#E69F00", "#56B4E9", "#F0E442", "#000000",
];

const OVERALL_COLOR = "#9aa0a6";
const MEAN_ALL_COLOR = "#202124";
const DRIFT_COLOR = "#c0392b";

const MARGIN = 36;
const LABEL_GUTTER = 90;
const BAND_HEIGHT = 150;
const BAND_GAP = 14;

function el(tag: string, attrs: Record<string, string | number>): SVGElement {
    const node = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) {
        node.setAttribute(key, String(value));
    }
    return node;
}

function seriesColor(key: SeriesKey): string {
    if (key === "all") return MEAN_ALL_COLOR;
    return CLASS_PALETTE[Number(key) % CLASS_PALETTE.length];
}

function barColor(key: SeriesKey): string {
    return key === "all" ? OVERALL_COLOR : seriesColor(key);
}

export function drawPht(scene: PhtScene, width: number): SVGSVGElement {
    const height =
        2 * MARGIN + scene.bands.length * BAND_HEIGHT
        + (scene.bands.length - 1) * BAND_GAP;
    const svg = el("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
    const innerW = width - MARGIN - LABEL_GUTTER - MARGIN;
    const cellW = innerW / scene.nWindows;
    const [spanLo, spanHi] = scene.span;

    scene.bands.forEach((band, b) => {
        const bandX = MARGIN + LABEL_GUTTER;
        const bandY = MARGIN + b * (BAND_HEIGHT + BAND_GAP);
        const group = el("g", { class: "band", "data-feature": band.feature });

        const label = el("text", {
            x: MARGIN, y: bandY + BAND_HEIGHT / 2, "font-size": 11,
            "font-family": "sans-serif", fill: "#333",
        });
        label.textContent = band.name;
        group.appendChild(label);

        band.cells.forEach((cell, position) => {
            const x0 = bandX + position * cellW;
            const cellGroup = el("g", {
                class: "cell", "data-window": cell.windowIndex,
            });
            cellGroup.appendChild(el("rect", {
                x: x0, y: bandY, width: cellW, height: BAND_HEIGHT,
                fill: "none", stroke: "#d0d0d0", "stroke-width": 0.5,
            }));
            for (const key of scene.series) {
                const bars = cell.bars[key];
                const binH = BAND_HEIGHT / bars.length;
                bars.forEach((fraction, i) => {
                    if (fraction === 0) return;
                    cellGroup.appendChild(el("rect", {
                        class: "bar",
                        x: x0,
                        y: bandY + BAND_HEIGHT - (i + 1) * binH,
                        width: fraction * cellW,
                        height: binH,
                        fill: barColor(key),
                        "fill-opacity": key === "all" ? 0.85 : 0.55,
                    }));
                });
            }
            group.appendChild(cellGroup);
        });

        for (const key of scene.series) {
            const points = band.polylines[key];
            if (points.length === 0) continue;
            const coords = points.map(([cell, fraction]) => {
                const x = bandX + (cell + 0.5) * cellW;
                const y = bandY + BAND_HEIGHT * (1 - fraction);
                return `${x.toFixed(2)},${y.toFixed(2)}`;
            });
            if (points.length > 1) {
                group.appendChild(el("polyline", {
                    class: "mean-line", points: coords.join(" "),
                    fill: "none", stroke: seriesColor(key), "stroke-width": 1.5,
                }));
            }
            for (const coord of coords) {
                const [cx, cy] = coord.split(",");
                group.appendChild(el("circle", {
                    class: "mean-dot", cx, cy, r: 2.2, fill: seriesColor(key),
                }));
            }
        }

        for (const marker of scene.driftMarkers) {
            const x = bandX + innerW * ((marker - spanLo) / (spanHi - spanLo));
            group.appendChild(el("line", {
                class: "drift-marker", x1: x, y1: bandY, x2: x,
                y2: bandY + BAND_HEIGHT, stroke: DRIFT_COLOR,
                "stroke-width": 1, "stroke-dasharray": "4 3",
            }));
        }
        svg.appendChild(group);
    });
    return svg as SVGSVGElement;
}

export function drawParallel(scene: ParallelScene, width: number): SVGSVGElement {
    const height = 420;
    const svg = el("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
    const innerH = height - 2 * MARGIN - 18;
    const slot = (width - 2 * MARGIN) / scene.axes.length;

    scene.axes.forEach((axis, i) => {
        const x = MARGIN + (i + 0.5) * slot;
        const group = el("g", { class: "axis", "data-feature": axis.feature });
        group.appendChild(el("line", {
            class: "axis-line", x1: x, y1: MARGIN, x2: x, y2: MARGIN + innerH,
            stroke: "#444", "stroke-width": 1,
        }));
        const label = el("text", {
            x, y: height - MARGIN + 8, "font-size": 11,
            "font-family": "sans-serif", "text-anchor": "middle", fill: "#333",
        });
        label.textContent = axis.name;
        group.appendChild(label);

        for (const key of scene.series) {
            const bars = axis.bars[key];
            const binH = innerH / bars.length;
            bars.forEach((fraction, bin) => {
                if (fraction === 0) return;
                group.appendChild(el("rect", {
                    class: "bar",
                    x, y: MARGIN + innerH - (bin + 1) * binH,
                    width: fraction * slot * 0.8, height: binH,
                    fill: barColor(key),
                    "fill-opacity": key === "all" ? 0.85 : 0.55,
                }));
            });
        }

        if (axis.highlight) {
            const bins = axis.highlight.length;
            const binH = innerH / bins;
            axis.highlight.forEach((fraction, bin) => {
                if (fraction === 0) return;
                group.appendChild(el("rect", {
                    class: "brush-highlight",
                    x, y: MARGIN + innerH - (bin + 1) * binH,
                    width: 4, height: binH,
                    fill: "#e6b400", "fill-opacity": Math.min(1, fraction),
                }));
            });
        }
        svg.appendChild(group);
    });
    return svg as SVGSVGElement;
}

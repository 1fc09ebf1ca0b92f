/* Explorer control state and its reducers.
 *
 * Controls always reflect the last successful server response; reducers
 * are pure so every action (and its inverse, where one exists) can be
 * tested for byte-identical request URLs. Class toggles and view changes
 * are client-side only: they never touch the request URL.
 */

import { SummariesQuery, buildSummariesUrl } from "./api.js";

export const N_MIN = 30;
export const MIN_WINDOW = 2 * N_MIN;
export const WINDOW_CAP = 40;
export const SNAP_CONTEXT = 5; // windows kept on each side of a snapped drift

export interface ExplorerState {
    size: number;
    /* grid phase: start of the first possible window, 0 <= offset < size */
    offset: number;
    /* absolute start of the visible slice; always offset + k * size */
    viewStart: number;
    limit: number | null;
    bins: number;
    visibleClasses: number[];
    brush: { feature: number; lo: number; hi: number } | null;
    view: "pht" | "parallel";
    showDriftMarkers: boolean;
    notice: string | null;
}

export function initialState(classIds: number[]): ExplorerState {
    return {
        size: 5200,
        offset: 0,
        viewStart: 0,
        limit: WINDOW_CAP,
        bins: 40,
        visibleClasses: [...classIds],
        brush: null,
        view: "pht",
        showDriftMarkers: true,
        notice: null,
    };
}

export function requestQuery(state: ExplorerState): SummariesQuery {
    return {
        size: state.size,
        offset: state.viewStart,
        bins: state.bins,
        limit: state.limit,
        brush: state.view === "parallel" ? state.brush : null,
    };
}

export function requestUrl(base: string, state: ExplorerState): string {
    return buildSummariesUrl(base, requestQuery(state));
}

export type Action =
    | { kind: "halve_window" }
    | { kind: "shift_offset"; samples: number }
    | { kind: "snap_to_drift"; point: number }
    | { kind: "set_size"; size: number }
    | { kind: "set_bins"; bins: number }
    | { kind: "set_limit"; limit: number | null }
    | { kind: "toggle_class"; classId: number }
    | { kind: "set_view"; view: "pht" | "parallel" }
    | { kind: "set_brush"; feature: number; lo: number; hi: number }
    | { kind: "clear_brush" }
    | { kind: "toggle_drift_markers" };

export function reduce(state: ExplorerState, action: Action): ExplorerState {
    switch (action.kind) {
        case "halve_window": {
            const size = Math.max(MIN_WINDOW, Math.floor(state.size / 2));
            const notice = size === MIN_WINDOW && state.size <= 2 * MIN_WINDOW
                ? `window clamped to the minimum of ${MIN_WINDOW}` : null;
            const offset = state.offset % size;
            const viewStart = rephase(state.viewStart, offset, size);
            return { ...state, size, offset, viewStart, notice };
        }
        case "shift_offset": {
            const target = state.viewStart + action.samples;
            const viewStart = Math.max(0, target);
            const notice = target < 0 ? "offset clamped at the stream start" : null;
            return { ...state, viewStart, offset: viewStart % state.size, notice };
        }
        case "snap_to_drift": {
            const offset = action.point % state.size;
            const viewStart = Math.max(
                offset, action.point - SNAP_CONTEXT * state.size,
            );
            return {
                ...state,
                offset,
                viewStart,
                limit: 2 * SNAP_CONTEXT,
                notice: null,
            };
        }
        case "set_size": {
            const size = Math.max(MIN_WINDOW, Math.floor(action.size));
            return { ...state, size, offset: 0, viewStart: 0, notice: null };
        }
        case "set_bins":
            return { ...state, bins: Math.max(1, Math.floor(action.bins)) };
        case "set_limit":
            return { ...state, limit: action.limit };
        case "toggle_class": {
            const on = state.visibleClasses.includes(action.classId);
            const visibleClasses = on
                ? state.visibleClasses.filter((c) => c !== action.classId)
                : [...state.visibleClasses, action.classId].sort((a, b) => a - b);
            return { ...state, visibleClasses };
        }
        case "set_view":
            return { ...state, view: action.view };
        case "set_brush": {
            if (action.lo >= action.hi) {
                // degenerate range clears the brush
                return { ...state, brush: null };
            }
            return {
                ...state,
                brush: { feature: action.feature, lo: action.lo, hi: action.hi },
            };
        }
        case "clear_brush":
            return { ...state, brush: null };
        case "toggle_drift_markers":
            return { ...state, showDriftMarkers: !state.showDriftMarkers };
    }
}

/* Largest start <= current that keeps the new grid phase. */
function rephase(viewStart: number, offset: number, size: number): number {
    if (viewStart <= offset) return offset;
    return offset + Math.floor((viewStart - offset) / size) * size;
}

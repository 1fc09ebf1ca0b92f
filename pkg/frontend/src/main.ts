/* Explorer bootstrap: controls on the left, the live diagram on the right.
 *
 * One in-flight summaries request at a time; responses for stale URLs are
 * discarded (latest wins), and slider/typing changes are debounced.
 */

import {
    DriftDoc,
    SchemaDoc,
    fetchDrift,
    fetchSchema,
    fetchSummaries,
    SummariesDoc,
} from "./api.js";
import {
    Action,
    ExplorerState,
    initialState,
    reduce,
    requestUrl,
} from "./state.js";
import {
    buildParallelScene,
    buildPhtScene,
    boundaryJumpCellPair,
    sceneCounts,
} from "./scene.js";
import { drawParallel, drawPht } from "./render.js";

const API_BASE = (window as unknown as { DRIFTSCOPE_API?: string })
    .DRIFTSCOPE_API ?? "";

const DEBOUNCE_MS = 150;

class Explorer {
    private state: ExplorerState;
    private lastGoodState: ExplorerState;
    private schema: SchemaDoc;
    private drift: DriftDoc | null = null;
    private lastDoc: SummariesDoc | null = null;
    private inflightUrl: string | null = null;
    private debounceTimer: number | null = null;

    constructor(schema: SchemaDoc) {
        this.schema = schema;
        this.state = initialState(schema.schema.class_ids);
        this.lastGoodState = this.state;
    }

    dispatch(action: Action): void {
        const before = requestUrl(API_BASE, this.state);
        this.state = reduce(this.state, action);
        this.renderControls();
        const after = requestUrl(API_BASE, this.state);
        if (after !== before || this.lastDoc === null) {
            this.scheduleFetch(after);
        } else {
            this.lastGoodState = this.state;
            this.redraw(); // client-side change only (class toggle, view)
        }
    }

    private scheduleFetch(url: string): void {
        if (this.debounceTimer !== null) window.clearTimeout(this.debounceTimer);
        this.debounceTimer = window.setTimeout(() => this.fetchNow(url), DEBOUNCE_MS);
    }

    private async fetchNow(url: string): Promise<void> {
        this.inflightUrl = url;
        try {
            const doc = await fetchSummaries(url);
            if (this.inflightUrl !== url) return; // stale response, drop it
            this.lastDoc = doc;
            this.lastGoodState = this.state;
            this.redraw();
            this.setStatus("");
        } catch (error) {
            if (this.inflightUrl !== url) return;
            // controls track the last successful response, never a failed one
            this.state = this.lastGoodState;
            this.renderControls();
            this.setStatus(`${error}`, true);
        }
    }

    private redraw(): void {
        if (!this.lastDoc) return;
        const host = document.getElementById("diagram")!;
        host.textContent = "";
        const options = {
            visibleClasses: this.state.visibleClasses,
            showMeans: true,
            driftMarkers: this.state.showDriftMarkers && this.drift
                ? this.drift.drift_points : [],
        };
        if (this.state.view === "pht") {
            const scene = buildPhtScene(this.lastDoc, options);
            host.appendChild(drawPht(scene, host.clientWidth || 1100));
            const counts = sceneCounts(scene);
            const jump = boundaryJumpCellPair(scene);
            this.setStatus(
                `${counts.bands} bands x ${scene.nWindows} windows`
                + (jump ? `; largest mean jump between cells ${jump[0]} and ${jump[1]}` : ""),
            );
        } else {
            const windowIndex = this.lastDoc.windows[0].window_index;
            const scene = buildParallelScene(this.lastDoc, windowIndex, options);
            host.appendChild(drawParallel(scene, host.clientWidth || 1100));
            this.setStatus(`window ${windowIndex}, ${scene.axes.length} axes`);
        }
    }

    private setStatus(text: string, isError = false): void {
        const status = document.getElementById("status")!;
        status.textContent = text + (this.state.notice ? ` (${this.state.notice})` : "");
        status.className = isError ? "error" : "";
    }

    private renderControls(): void {
        (document.getElementById("size") as HTMLInputElement).value =
            String(this.state.size);
        (document.getElementById("offset") as HTMLInputElement).value =
            String(this.state.viewStart);
        (document.getElementById("bins") as HTMLInputElement).value =
            String(this.state.bins);
        (document.getElementById("limit") as HTMLInputElement).value =
            this.state.limit === null ? "" : String(this.state.limit);
    }

    async start(): Promise<void> {
        const controls = document.getElementById("controls")!;
        controls.classList.remove("loading");
        this.renderControls();

        const bind = (id: string, handler: (value: string) => Action) => {
            const input = document.getElementById(id) as HTMLInputElement;
            input.addEventListener("change", () => this.dispatch(handler(input.value)));
        };
        bind("size", (v) => ({ kind: "set_size", size: Number(v) }));
        bind("bins", (v) => ({ kind: "set_bins", bins: Number(v) }));
        bind("limit", (v) => ({
            kind: "set_limit", limit: v === "" ? null : Number(v),
        }));

        document.getElementById("halve")!.addEventListener(
            "click", () => this.dispatch({ kind: "halve_window" }));
        document.getElementById("shift-left")!.addEventListener(
            "click", () => this.dispatch({ kind: "shift_offset", samples: -this.state.size }));
        document.getElementById("shift-right")!.addEventListener(
            "click", () => this.dispatch({ kind: "shift_offset", samples: this.state.size }));
        document.getElementById("view-pht")!.addEventListener(
            "click", () => this.dispatch({ kind: "set_view", view: "pht" }));
        document.getElementById("view-parallel")!.addEventListener(
            "click", () => this.dispatch({ kind: "set_view", view: "parallel" }));

        const classesHost = document.getElementById("classes")!;
        for (const classId of this.schema.schema.class_ids) {
            const label = document.createElement("label");
            const box = document.createElement("input");
            box.type = "checkbox";
            box.checked = true;
            box.addEventListener("change",
                () => this.dispatch({ kind: "toggle_class", classId }));
            label.appendChild(box);
            label.append(` class ${this.schema.schema.class_names[String(classId)]}`);
            classesHost.appendChild(label);
        }

        const brushApply = document.getElementById("brush-apply")!;
        brushApply.addEventListener("click", () => {
            const feature = Number(
                (document.getElementById("brush-feature") as HTMLInputElement).value);
            const lo = Number(
                (document.getElementById("brush-lo") as HTMLInputElement).value);
            const hi = Number(
                (document.getElementById("brush-hi") as HTMLInputElement).value);
            this.dispatch({ kind: "set_brush", feature, lo, hi });
        });
        document.getElementById("brush-clear")!.addEventListener(
            "click", () => this.dispatch({ kind: "clear_brush" }));

        const snapHost = document.getElementById("drift-points")!;
        try {
            this.drift = await fetchDrift(API_BASE, "per_class");
            for (const point of this.drift.drift_points) {
                const button = document.createElement("button");
                button.textContent = `snap to ${point}`;
                button.addEventListener("click",
                    () => this.dispatch({ kind: "snap_to_drift", point }));
                snapHost.appendChild(button);
            }
        } catch {
            snapHost.textContent = "drift detection unavailable";
        }

        await this.fetchNow(requestUrl(API_BASE, this.state));
    }
}

fetchSchema(API_BASE)
    .then((schema) => new Explorer(schema).start())
    .catch((error) => {
        const status = document.getElementById("status")!;
        status.textContent = `cannot reach the driftscope server: ${error}`;
        status.className = "error";
    });

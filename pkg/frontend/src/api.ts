/* Typed client for the driftscope HTTP API.
 *
 * URL building is deterministic: parameters are emitted in a fixed order,
 * so replaying the same control state always yields a byte-identical
 * request URL (the cache key on both ends).
 */

export interface SchemaDoc {
    format_version: number;
    content_hash: string;
    schema: {
        feature_names: string[];
        feature_ranges: [number, number][];
        class_ids: number[];
        class_names: Record<string, string>;
    };
}

export interface ClassSummaryDoc {
    counts: number[];
    mean: number | null;
    count: number;
}

export interface FeatureSummaryDoc {
    name: string;
    edges: number[];
    counts: number[];
    mean: number;
    std: number;
    per_class: Record<string, ClassSummaryDoc>;
    brushed_counts?: number[];
}

export interface WindowSummaryDoc {
    window_index: number;
    start: number;
    size: number;
    count_per_class: Record<string, number>;
    per_feature: FeatureSummaryDoc[];
}

export interface SummariesDoc {
    format_version: number;
    content_hash: string;
    params: Record<string, unknown>;
    windows: WindowSummaryDoc[];
}

export interface DriftDoc {
    format_version: number;
    content_hash: string;
    config: Record<string, unknown>;
    drift_points: number[];
    profile: [number, number][];
}

export interface SummariesQuery {
    size: number;
    offset: number;
    bins: number;
    limit: number | null;
    brush: { feature: number; lo: number; hi: number } | null;
}

/* Fixed parameter order; omitted when at their no-op values. */
export function buildSummariesUrl(base: string, q: SummariesQuery): string {
    const parts: string[] = [`size=${q.size}`];
    if (q.offset !== 0) parts.push(`offset=${q.offset}`);
    if (q.bins !== 40) parts.push(`bins=${q.bins}`);
    if (q.limit !== null) parts.push(`limit=${q.limit}`);
    if (q.brush !== null) {
        parts.push(`brush=${q.brush.feature}:${q.brush.lo}:${q.brush.hi}`);
    }
    return `${base}/summaries?${parts.join("&")}`;
}

export function buildFigureUrl(
    base: string,
    q: SummariesQuery,
    classes: number[],
): string {
    const summariesUrl = buildSummariesUrl(base, q);
    const query = summariesUrl.slice(summariesUrl.indexOf("?") + 1);
    const classPart = classes.length ? `&classes=${classes.join(",")}` : "";
    return `${base}/figure.svg?${query}${classPart}`;
}

async function getJson<T>(url: string): Promise<T> {
    const response = await fetch(url);
    if (!response.ok) {
        const body = await response.text();
        throw new Error(`${response.status} from ${url}: ${body}`);
    }
    return (await response.json()) as T;
}

export const fetchSchema = (base: string) => getJson<SchemaDoc>(`${base}/schema`);

export const fetchSummaries = (url: string) => getJson<SummariesDoc>(url);

export const fetchDrift = (base: string, monitor: "marginal" | "per_class") =>
    getJson<DriftDoc>(`${base}/drift?monitor=${monitor}`);

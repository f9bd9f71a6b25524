/**
 * Self-contained SVG rendering of log-log error curves: one panel per
 * (domain, refraction kind), curves per eigenvalue index, each annotated
 * with its fitted slope.  Output is a pure function of the input curves.
 */

import { ErrorCurve } from "./slope.js";

const PANEL_W = 360;
const PANEL_H = 300;
const MARGIN = { top: 36, right: 16, bottom: 44, left: 60 };
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b"];
const MARKERS = ["circle", "square", "diamond"];

interface Panel {
    title: string;
    curves: ErrorCurve[];
}

function groupPanels(curves: ErrorCurve[]): Panel[] {
    // one panel per (domain, refraction model); elements share a panel
    const map = new Map<string, Panel>();
    for (const curve of curves) {
        const key = `${curve.domain} (${curve.nKind} n)`;
        const panel = map.get(key);
        if (panel) panel.curves.push(curve);
        else map.set(key, { title: key, curves: [curve] });
    }
    return [...map.values()];
}

function niceLogTicks(lo: number, hi: number): number[] {
    const ticks: number[] = [];
    for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
        const v = 10 ** e;
        if (v >= lo / 1.001 && v <= hi * 1.001) ticks.push(v);
    }
    return ticks.length >= 2 ? ticks : [lo, hi];
}

function fmtPow10(v: number): string {
    const e = Math.round(Math.log10(v));
    return Math.abs(10 ** e - v) / v < 1e-9 ? `1e${e}` : v.toExponential(1);
}

function marker(shape: string, x: number, y: number, color: string): string {
    const s = 3.5;
    switch (shape) {
        case "square":
            return `<rect x="${x - s}" y="${y - s}" width="${2 * s}" height="${2 * s}" fill="${color}"/>`;
        case "diamond":
            return `<path d="M ${x} ${y - s} L ${x + s} ${y} L ${x} ${y + s} L ${x - s} ${y} Z" fill="${color}"/>`;
        default:
            return `<circle cx="${x}" cy="${y}" r="${s}" fill="${color}"/>`;
    }
}

function renderPanel(panel: Panel, ox: number, oy: number): string {
    const innerW = PANEL_W - MARGIN.left - MARGIN.right;
    const innerH = PANEL_H - MARGIN.top - MARGIN.bottom;
    const pts = panel.curves.flatMap(c => c.points).filter(p => p.error > 0);
    const parts: string[] = [];
    parts.push(`<g transform="translate(${ox},${oy})">`);
    parts.push(`<text x="${PANEL_W / 2}" y="18" text-anchor="middle" `
        + `font-size="13" font-weight="bold">${panel.title}</text>`);
    parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${innerW}" `
        + `height="${innerH}" fill="none" stroke="#999"/>`);
    if (pts.length === 0) {
        parts.push(`<text x="${PANEL_W / 2}" y="${PANEL_H / 2}" `
            + `text-anchor="middle" font-size="12" fill="#888">no data</text>`);
        parts.push("</g>");
        return parts.join("\n");
    }
    const hs = pts.map(p => p.h);
    const es = pts.map(p => p.error);
    const hLo = Math.min(...hs) / 1.15;
    const hHi = Math.max(...hs) * 1.15;
    const eLo = Math.min(...es) / 1.6;
    const eHi = Math.max(...es) * 1.6;
    const sx = (h: number) => MARGIN.left
        + innerW * (Math.log(h) - Math.log(hLo)) / (Math.log(hHi) - Math.log(hLo));
    const sy = (e: number) => MARGIN.top
        + innerH * (1 - (Math.log(e) - Math.log(eLo)) / (Math.log(eHi) - Math.log(eLo)));

    for (const t of niceLogTicks(hLo, hHi)) {
        const x = sx(t);
        parts.push(`<line x1="${x}" y1="${MARGIN.top}" x2="${x}" `
            + `y2="${MARGIN.top + innerH}" stroke="#e0e0e0"/>`);
        parts.push(`<text x="${x}" y="${MARGIN.top + innerH + 16}" `
            + `text-anchor="middle" font-size="10">${fmtPow10(t)}</text>`);
    }
    for (const t of niceLogTicks(eLo, eHi)) {
        const y = sy(t);
        parts.push(`<line x1="${MARGIN.left}" y1="${y}" `
            + `x2="${MARGIN.left + innerW}" y2="${y}" stroke="#e0e0e0"/>`);
        parts.push(`<text x="${MARGIN.left - 6}" y="${y + 3}" `
            + `text-anchor="end" font-size="10">${fmtPow10(t)}</text>`);
    }
    parts.push(`<text x="${MARGIN.left + innerW / 2}" y="${PANEL_H - 8}" `
        + `text-anchor="middle" font-size="11">h</text>`);
    parts.push(`<text x="14" y="${MARGIN.top + innerH / 2}" font-size="11" `
        + `text-anchor="middle" transform="rotate(-90 14 ${MARGIN.top + innerH / 2})">`
        + `|k - k_ref|</text>`);

    panel.curves.forEach((curve, ci) => {
        const color = COLORS[ci % COLORS.length];
        const shape = MARKERS[ci % MARKERS.length];
        const usable = curve.points.filter(p => p.error > 0);
        const path = usable.map(p => `${sx(p.h).toFixed(2)},${sy(p.error).toFixed(2)}`)
            .join(" ");
        const slopeText = curve.slope === null ? "n/a" : curve.slope.toFixed(2);
        const slopeData = curve.slope === null ? "" : String(curve.slope);
        parts.push(`<g class="curve" data-index="${curve.index}" `
            + `data-slope="${slopeData}">`);
        if (usable.length > 1) {
            parts.push(`<polyline points="${path}" fill="none" `
                + `stroke="${color}" stroke-width="1.5"/>`);
        }
        for (const p of usable) {
            parts.push(marker(shape, sx(p.h), sy(p.error), color));
        }
        parts.push(`<text x="${MARGIN.left + 8}" y="${MARGIN.top + 14 + 14 * ci}" `
            + `font-size="11" fill="${color}">${curve.label}: slope ${slopeText}`
            + `</text>`);
        parts.push("</g>");
    });
    parts.push("</g>");
    return parts.join("\n");
}

/** Render the curves as a standalone SVG document. */
export function renderSvg(curves: ErrorCurve[]): string {
    const panels = groupPanels(curves);
    const cols = Math.max(1, Math.min(2, panels.length));
    const rows = Math.max(1, Math.ceil(panels.length / cols));
    const width = cols * PANEL_W;
    const height = rows * PANEL_H;
    const body = panels.map((panel, i) => renderPanel(
        panel, (i % cols) * PANEL_W, Math.floor(i / cols) * PANEL_H));
    if (panels.length === 0) {
        body.push(`<text x="${width / 2}" y="${height / 2}" `
            + `text-anchor="middle" font-size="13" fill="#888">`
            + `empty input: nothing to plot</text>`);
    }
    return [`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" `
        + `height="${height}" font-family="sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    ...body,
    "</svg>", ""].join("\n");
}

/**
 * CSV -> figure pipeline: parse the study CSV, rebuild the error curves
 * (re-fitting the slopes rather than trusting any upstream number), and
 * write the SVG.  Rendering is a pure function of the CSV contents.
 */

import { readFileSync, writeFileSync } from "fs";

import { parseStudyCsv, StudyRow } from "./csv.js";
import { buildCurves, ErrorCurve } from "./slope.js";
import { renderSvg } from "./svg.js";

export interface RenderResult {
    curves: ErrorCurve[];
    svg: string;
    warnings: string[];
}

export interface RenderOptions {
    /** keep only curves whose "domain" matches */
    domain?: string;
    /** keep only curves whose refraction kind matches */
    nKind?: string;
}

export function renderText(csvText: string, options: RenderOptions = {}): RenderResult {
    const rows: StudyRow[] = parseStudyCsv(csvText);
    const warnings: string[] = [];
    if (rows.length === 0) {
        warnings.push("empty CSV: rendering a placeholder figure");
    }
    let curves = buildCurves(rows);
    if (options.domain) {
        curves = curves.filter(c => c.domain === options.domain);
    }
    if (options.nKind) {
        curves = curves.filter(c => c.nKind === options.nKind);
    }
    for (const curve of curves) {
        if (curve.points.length < 3) {
            warnings.push(`curve ${curve.domain}/${curve.label}: fewer than `
                + `3 levels, no slope fitted`);
        }
    }
    return { curves, svg: renderSvg(curves), warnings };
}

export function renderFile(csvPath: string, outPath: string,
    options: RenderOptions = {}): RenderResult {
    const result = renderText(readFileSync(csvPath, "utf8"), options);
    writeFileSync(outPath, result.svg);
    return result;
}

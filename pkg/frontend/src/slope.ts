/**
 * Error-curve construction mirroring the solver's study semantics: the
 * reference value is the order-2 extrapolation of the two finest levels
 * and the slope is a least-squares fit of log(error) against log(h) over
 * every level except the finest (whose error against that reference is
 * fixed by construction).
 */

import { StudyRow } from "./csv.js";

export interface ErrorCurve {
    label: string;
    domain: string;
    element: string;
    nKind: string;
    index: number;
    points: { h: number; error: number }[];
    slope: number | null;
}

interface Complex { re: number; im: number; }

function cAbs(z: Complex): number {
    return Math.hypot(z.re, z.im);
}

export function richardsonReference(
    kMid: Complex, kFine: Complex, hMid: number, hFine: number): Complex {
    const r2 = (hMid / hFine) ** 2;
    return {
        re: (r2 * kFine.re - kMid.re) / (r2 - 1),
        im: (r2 * kFine.im - kMid.im) / (r2 - 1),
    };
}

export function fitSlope(points: { h: number; error: number }[]): number | null {
    const usable = points.filter(p => p.error > 0);
    if (usable.length < 2) return null;
    const xs = usable.map(p => Math.log(p.h));
    const ys = usable.map(p => Math.log(p.error));
    const n = xs.length;
    const mx = xs.reduce((a, b) => a + b, 0) / n;
    const my = ys.reduce((a, b) => a + b, 0) / n;
    let sxy = 0;
    let sxx = 0;
    for (let i = 0; i < n; i++) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) ** 2;
    }
    return sxy / sxx;
}

/** Group rows into per-eigenvalue error curves with fitted slopes. */
export function buildCurves(rows: StudyRow[]): ErrorCurve[] {
    const groups = new Map<string, StudyRow[]>();
    for (const row of rows) {
        const key = `${row.domain}|${row.element}|${row.nKind}|${row.index}`;
        const bucket = groups.get(key);
        if (bucket) bucket.push(row);
        else groups.set(key, [row]);
    }
    const curves: ErrorCurve[] = [];
    for (const [key, bucket] of groups) {
        const levels = [...bucket].sort((a, b) => b.h - a.h); // coarse -> fine
        const curve: ErrorCurve = {
            label: `${levels[0].element} k${levels[0].index}`,
            domain: levels[0].domain,
            element: levels[0].element,
            nKind: levels[0].nKind,
            index: levels[0].index,
            points: [],
            slope: null,
        };
        if (levels.length >= 2) {
            const fine = levels[levels.length - 1];
            const mid = levels[levels.length - 2];
            const ref = richardsonReference(
                { re: mid.kRe, im: mid.kIm },
                { re: fine.kRe, im: fine.kIm }, mid.h, fine.h);
            curve.points = levels.map(r => ({
                h: r.h,
                error: cAbs({ re: r.kRe - ref.re, im: r.kIm - ref.im }),
            }));
            if (levels.length >= 3) {
                curve.slope = fitSlope(curve.points.slice(0, -1));
            }
        }
        curves.push(curve);
    }
    curves.sort((a, b) => a.domain.localeCompare(b.domain)
        || a.nKind.localeCompare(b.nKind) || a.index - b.index);
    return curves;
}

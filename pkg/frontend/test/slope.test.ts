import { describe, expect, it } from "vitest";

import { CSV_HEADER, parseStudyCsv, CsvError } from "../src/csv.js";
import { buildCurves, fitSlope, richardsonReference } from "../src/slope.js";

function syntheticCsv(order: number): string {
    // k(h) = 1.5 + 0.3 h^order sampled on three halving levels
    const limit = 1.5;
    const rows = [CSV_HEADER];
    for (const [level, h] of [[8, 0.2], [16, 0.1], [32, 0.05]] as const) {
        const k = limit + 0.3 * h ** order;
        rows.push(`square,adini,constant,0.0667,${level},${h},1,${k},0,1e-12`);
    }
    return rows.join("\n") + "\n";
}

describe("csv parsing", () => {
    it("parses well-formed rows", () => {
        const rows = parseStudyCsv(syntheticCsv(2));
        expect(rows).toHaveLength(3);
        expect(rows[0].domain).toBe("square");
        expect(rows[2].h).toBeCloseTo(0.05, 12);
    });

    it("returns no rows for empty input", () => {
        expect(parseStudyCsv("")).toHaveLength(0);
    });

    it("reports the line number of a malformed row", () => {
        const text = syntheticCsv(2).replace("16,0.1", "16,not-a-number");
        expect(() => parseStudyCsv(text)).toThrowError(/line 3/);
    });

    it("rejects a wrong header", () => {
        expect(() => parseStudyCsv("a,b,c\n")).toThrowError(CsvError);
    });
});

describe("slope fitting", () => {
    it("fits power-law error data exactly for any order", () => {
        for (const order of [1, 2, 3]) {
            const points = [0.4, 0.2, 0.1].map(h => ({
                h, error: 0.7 * h ** order,
            }));
            expect(Math.abs(fitSlope(points)! - order)).toBeLessThan(1e-12);
        }
    });

    it("recovers order 2 end to end (the reference assumes order 2)", () => {
        const curves = buildCurves(parseStudyCsv(syntheticCsv(2)));
        expect(curves).toHaveLength(1);
        expect(Math.abs(curves[0].slope! - 2)).toBeLessThan(1e-9);
    });

    it("uses the order-2 extrapolated reference", () => {
        const ref = richardsonReference(
            { re: 1.5 + 0.3 * 0.01, im: 0 },
            { re: 1.5 + 0.3 * 0.0025, im: 0 }, 0.1, 0.05);
        expect(ref.re).toBeCloseTo(1.5, 14);
    });

    it("needs two positive errors", () => {
        expect(fitSlope([{ h: 0.1, error: 1e-3 }])).toBeNull();
        expect(fitSlope([{ h: 0.1, error: 0 }, { h: 0.05, error: 0 }])).toBeNull();
    });

    it("groups complex conjugate rows into separate indexed curves", () => {
        const rows = [CSV_HEADER];
        for (const [level, h] of [[8, 0.2], [16, 0.1], [32, 0.05]] as const) {
            const k = 4.5 + 0.2 * h * h;
            rows.push(`square,mz,affine,0.111,${level},${h},5,${k},-0.87,1e-11`);
            rows.push(`square,mz,affine,0.111,${level},${h},6,${k},0.87,1e-11`);
        }
        const curves = buildCurves(parseStudyCsv(rows.join("\n") + "\n"));
        expect(curves).toHaveLength(2);
        expect(curves.map(c => c.index)).toEqual([5, 6]);
        for (const curve of curves) {
            expect(Math.abs(curve.slope! - 2)).toBeLessThan(1e-9);
        }
    });
});

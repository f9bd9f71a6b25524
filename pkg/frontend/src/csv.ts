/**
 * Parser for the solver's study CSV.
 *
 * Schema (fixed column order, one eigenvalue per row):
 *   domain,element,n_kind,mu,level,h,index,k_re,k_im,residual
 */

export interface StudyRow {
    domain: string;
    element: string;
    nKind: string;
    mu: number;
    level: number;
    h: number;
    index: number;
    kRe: number;
    kIm: number;
    residual: number;
}

export const CSV_HEADER =
    "domain,element,n_kind,mu,level,h,index,k_re,k_im,residual";

export class CsvError extends Error {
    constructor(public line: number, message: string) {
        super(`line ${line}: ${message}`);
    }
}

function parseNumber(field: string, name: string, line: number): number {
    const value = Number(field);
    if (field.trim() === "" || Number.isNaN(value)) {
        throw new CsvError(line, `bad ${name} value ${JSON.stringify(field)}`);
    }
    return value;
}

/** Parse CSV text; empty input yields an empty row list. */
export function parseStudyCsv(text: string): StudyRow[] {
    const lines = text.split(/\r?\n/).filter((l, i) => !(l === "" ));
    if (lines.length === 0) return [];
    if (lines[0] !== CSV_HEADER) {
        throw new CsvError(1, `unexpected header ${JSON.stringify(lines[0])}`);
    }
    const rows: StudyRow[] = [];
    for (let i = 1; i < lines.length; i++) {
        const lineNo = i + 1;
        const fields = lines[i].split(",");
        if (fields.length !== 10) {
            throw new CsvError(lineNo, `expected 10 fields, got ${fields.length}`);
        }
        rows.push({
            domain: fields[0],
            element: fields[1],
            nKind: fields[2],
            mu: parseNumber(fields[3], "mu", lineNo),
            level: Math.trunc(parseNumber(fields[4], "level", lineNo)),
            h: parseNumber(fields[5], "h", lineNo),
            index: Math.trunc(parseNumber(fields[6], "index", lineNo)),
            kRe: parseNumber(fields[7], "k_re", lineNo),
            kIm: parseNumber(fields[8], "k_im", lineNo),
            residual: parseNumber(fields[9], "residual", lineNo),
        });
    }
    return rows;
}

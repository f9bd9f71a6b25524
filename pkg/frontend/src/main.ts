/**
 * CLI: node dist/main.js <study.csv> <out.svg> [--domain NAME] [--n-kind KIND]
 *
 * Exits 0 on success (including an empty CSV, which produces a warning
 * and a placeholder figure), 1 on malformed input.
 */

import { CsvError } from "./csv.js";
import { renderFile, RenderOptions } from "./render.js";

function main(argv: string[]): number {
    const positional: string[] = [];
    const options: RenderOptions = {};
    for (let i = 0; i < argv.length; i++) {
        if (argv[i] === "--domain") options.domain = argv[++i];
        else if (argv[i] === "--n-kind") options.nKind = argv[++i];
        else positional.push(argv[i]);
    }
    if (positional.length !== 2) {
        console.error("usage: main.js <study.csv> <out.svg> "
            + "[--domain NAME] [--n-kind KIND]");
        return 1;
    }
    try {
        const result = renderFile(positional[0], positional[1], options);
        for (const warning of result.warnings) {
            console.warn(`warning: ${warning}`);
        }
        for (const curve of result.curves) {
            const slope = curve.slope === null ? "n/a" : curve.slope.toFixed(9);
            console.log(`${curve.domain} ${curve.nKind} ${curve.label} `
                + `slope=${slope}`);
        }
        return 0;
    } catch (err) {
        if (err instanceof CsvError) {
            console.error(`malformed CSV: ${err.message}`);
            return 1;
        }
        throw err;
    }
}

process.exit(main(process.argv.slice(2)));

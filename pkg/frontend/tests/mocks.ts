/** Shared service mocks: the worked ten-row report and fetch stubs. */

import type { PosteriorReport, ReportRow } from "../src/api.js";

function row(
  upsilon: number,
  tid: number,
  predicted: number,
  prior: number,
  posterior: number,
): ReportRow {
  return { phi: 2, upsilon, tid, index: 1904, predicted, prior, posterior };
}

/** The ranked-analytics example: ten worlds, posterior .184 maximal.
 * Rows arrive grouped by hypothesis, not ranked; sorting is the UI's job. */
export function tenWorldReport(): PosteriorReport {
  return {
    phenomenon: 2,
    names: { index: "Year", value: "Lynx" },
    at: 1904,
    sigma: 25,
    rows: [
      row(1, 1, 16.49, 0.167, 0.047),
      row(1, 2, 18.22, 0.167, 0.0),
      row(2, 1, 79.81, 0.167, 0.013),
      row(2, 2, 77.82, 0.167, 0.017),
      row(3, 1, 89.59, 0.055, 0.131),
      row(3, 2, 65.06, 0.055, 0.184),
      row(3, 3, 90.08, 0.055, 0.124),
      row(3, 4, 77.46, 0.055, 0.176),
      row(3, 5, 88.32, 0.055, 0.127),
      row(3, 6, 75.92, 0.055, 0.18),
    ],
    aggregates: [
      { upsilon: 1, posterior: 0.047 },
      { upsilon: 2, posterior: 0.03 },
      { upsilon: 3, posterior: 0.922 },
    ],
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** 21 years of the bundled observation series. */
export const LYNX_CSV = `Year,Lynx
1900,30.0
1901,43.7
1902,62.6
1903,83.3
1904,83.3
1905,43.2
1906,17.9
1907,11.0
1908,9.8
1909,11.2
1910,14.5
1911,20.2
1912,29.1
1913,42.3
1914,60.8
1915,81.9
1916,85.1
1917,46.6
1918,19.1
1919,11.2
1920,9.8
`;

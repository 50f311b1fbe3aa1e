import assert from "node:assert/strict";
import { test } from "node:test";

import { num, parseCsv, requireColumns } from "../src/csv.js";

test("parses header and rows", () => {
  const rows = parseCsv("a,b,c\n1,2,3\n4,,6\n");
  assert.equal(rows.length, 2);
  assert.deepEqual(rows[0], { a: "1", b: "2", c: "3" });
  assert.equal(rows[1].b, "");
});

test("handles quoted fields with commas and escaped quotes", () => {
  const rows = parseCsv('a,b\n"x,y","he said ""hi"""\n');
  assert.equal(rows[0].a, "x,y");
  assert.equal(rows[0].b, 'he said "hi"');
});

test("handles crlf and missing trailing newline", () => {
  const rows = parseCsv("a,b\r\n1,2\r\n3,4");
  assert.equal(rows.length, 2);
  assert.equal(rows[1].b, "4");
});

test("num returns NaN for blanks", () => {
  const rows = parseCsv("a\n\n");
  assert.ok(Number.isNaN(num({ a: "" }, "a")));
  assert.equal(num({ a: "2.5" }, "a"), 2.5);
});

test("requireColumns reports missing columns", () => {
  const rows = parseCsv("a,b\n1,2\n");
  requireColumns(rows, ["a", "b"]);
  assert.throws(() => requireColumns(rows, ["zz"]), /missing column 'zz'/);
  assert.throws(() => requireColumns([], ["a"]), /empty selection/);
});

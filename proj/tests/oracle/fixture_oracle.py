#!/usr/bin/env python3
"""Independent reference for the fixture corpus.

Computes every per-notebook measure and the corpus summary straight from the
definitions, using Python's own tokenizer and AST instead of the library's
scanners. `--emit` prints the values; `--check FILE` recomputes them and
compares against a frozen copy.
"""
import argparse
import ast
import io
import json
import os
import re
import sys
import tokenize

import numpy as np

MAX_LINE = 79
TEST_SUBSTRINGS = ["test", "Test", "TEST", "mock", "Mock", "MOCK"]
TEST_ALLOW = ["nose2", "robot"]
IDENT = r"A-Za-z0-9_"


# ---------------------------------------------------------------- notebook

def source_lines(src):
    text = "".join(src) if isinstance(src, list) else src
    if text == "":
        return []
    return [l[:-1] if l.endswith("\r") else l for l in text.split("\n")]


def blank(lines):
    return all(l.strip() == "" for l in lines)


def is_python(doc):
    meta = doc.get("metadata", {})
    lang = meta.get("kernelspec", {}).get("language") or meta.get("language_info", {}).get("name")
    if lang is None:
        return True
    lang = lang.lower()
    return lang.startswith("python") or lang in ("ipython", "py")


def counter(cell):
    v = cell.get("execution_count")
    return v if isinstance(v, int) and not isinstance(v, bool) and v >= 0 else None


# --------------------------------------------------------------- extraction

def inside_string(prefix_lines):
    """Does the text after these lines start inside a string literal?"""
    text = "\n".join(prefix_lines) + "\n"
    try:
        for _ in tokenize.generate_tokens(io.StringIO(text).readline):
            pass
    except tokenize.TokenError as e:
        return "string" in str(e.args[0])
    return False


SHELL_ASSIGN = re.compile(r"^\s*[A-Za-z_][\w.]*(\s*,\s*[A-Za-z_][\w.]*)*\s*=\s*!")
INTROSPECT = re.compile(r"^\s*(\?\??[\w.]+|[\w.]+\?\??)\s*$")


def strip_cell(lines):
    if lines and lines[0].lstrip().startswith("%%"):
        return ["" for _ in lines], [False] * len(lines)
    out, keep = [], []
    for line in lines:
        s = line.lstrip()
        magic = (s.startswith("%") or s.startswith("!") or SHELL_ASSIGN.match(line)
                 or INTROSPECT.match(line))
        if magic and not inside_string(out):
            out.append("")
            keep.append(False)
        else:
            out.append(line)
            keep.append(True)
    return out, keep


def extract(cells):
    """Script lines plus, per line, its (cell, line) or None."""
    script, where = [], []
    first = True
    for c in cells:
        if c["kind"] != "code":
            continue
        if not first:
            script.append("")
            where.append(None)
        first = False
        text, keep = strip_cell(c["lines"])
        for j, (t, k) in enumerate(zip(text, keep)):
            script.append(t)
            where.append((c["index"], j) if k else None)
    return script, where


# ----------------------------------------------------------------- markdown

def fenced(lines):
    out, open_char, open_len = [], None, 0
    for l in lines:
        m = re.match(r"^\s*(`{3,}|~{3,})(.*)$", l)
        if open_char is None:
            if m:
                open_char, open_len = m.group(1)[0], len(m.group(1))
                out.append(True)
            else:
                out.append(False)
        else:
            out.append(True)
            if m and m.group(1)[0] == open_char and len(m.group(1)) >= open_len and m.group(2).strip() == "":
                open_char = None
    return out


def strip_md_prefixes(s):
    while True:
        s = s.lstrip()
        m = (re.match(r"^>", s) or re.match(r"^[-*+][ \t]", s) or re.match(r"^\d{1,9}[.)][ \t]", s))
        if m:
            s = s[m.end():]
            continue
        m = re.match(r"^(#{1,6})(?=[ \t]|$)", s)
        if m:
            s = s[m.end():]
            body = s.rstrip()
            m2 = re.search(r"(^|[ \t])#+$", body)
            if m2:
                s = body[: m2.start() + len(m2.group(1))]
            continue
        return s


def is_word(tok):
    return any(ch.isascii() and ch.isalnum() or not ch.isascii() for ch in tok)


def md_line_words(line):
    s = re.sub(r"<[A-Za-z/!][^>]*>", " ", line)
    s = re.sub(r"!\[[^\]]*\]\([^)]*\)", " ", s)
    s = re.sub(r"\[([^\]]*)\]\([^)]*\)", r"\1", s)
    s = strip_md_prefixes(s)
    n = 0
    for tok in s.split():
        t = tok.strip("*_~").replace("`", "").strip("*_~")
        if is_word(t):
            n += 1
    return n


def md_tokens(lines):
    words = nlines = 0
    for l, f in zip(lines, fenced(lines)):
        if f:
            continue
        w = md_line_words(l)
        words += w
        nlines += w > 0
    return words, nlines


ATX = re.compile(r"^ {0,3}(#{1,6})[ \t](.*)$")
SETEXT = re.compile(r"^ {0,3}(=+|-+)[ \t]*$")
LISTQ = re.compile(r"^\s*(>|[-*+]([ \t]|$)|\d+[.)]( |$))")


def atx_text(line):
    m = ATX.match(line)
    if not m:
        return None
    body = m.group(2).strip()
    m2 = re.search(r"(^|[ \t])#+$", body)
    if m2:
        body = body[: m2.start()].rstrip()
    return body


def headings(lines):
    out = []
    fl = fenced(lines)
    for i, l in enumerate(lines):
        if fl[i]:
            continue
        t = atx_text(l)
        if t is not None:
            out.append(t)
            continue
        if not SETEXT.match(l) or i == 0 or fl[i - 1]:
            continue
        prev = lines[i - 1]
        if prev.strip() == "" or atx_text(prev) is not None or SETEXT.match(prev) or LISTQ.match(prev):
            continue
        out.append(prev.strip())
    return out


# --------------------------------------------------------------------- lint

def import_records(tree):
    recs = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            for a in node.names:
                bound = a.asname or a.name.split(".")[0]
                recs.append(dict(module=a.name, bound=[bound], wildcard=False, node=node))
        elif isinstance(node, ast.ImportFrom):
            mod = "." * node.level + (node.module or "")
            if node.names[0].name == "*":
                recs.append(dict(module=mod, bound=[], names=[], wildcard=True, node=node))
            else:
                recs.append(dict(module=mod, bound=[a.asname or a.name for a in node.names],
                                 names=[a.name for a in node.names], wildcard=False, node=node))
    recs.sort(key=lambda r: (r["node"].lineno, r["node"].col_offset))
    return recs


def token_used(script, name, node):
    pat = re.compile(r"(?<![%s])%s(?![%s])" % (IDENT, re.escape(name), IDENT))
    b, e = node.lineno - 1, node.end_lineno - 1
    for i, line in enumerate(script):
        if b <= i <= e:
            lo = node.col_offset if i == b else 0
            hi = node.end_col_offset if i == e else len(line)
            line = line[:lo] + " " * (hi - lo) + line[hi:]
        if pat.search(line):
            return True
    return False


def whitespace_checks(script, mapped):
    """Lines with bad whitespace and lines with several statements."""
    toks = list(tokenize.generate_tokens(io.StringIO("\n".join(script) + "\n").readline))
    bad, multi = set(), set()
    # subscripts holding a slice at their own depth
    slice_open = set()
    stack = []
    prev = None
    for t in toks:
        if t.type == tokenize.OP and t.string in "([{":
            subscript = (t.string == "[" and prev is not None and prev.start[0] == t.start[0]
                         and (prev.type == tokenize.NAME or prev.string in (")", "]")))
            stack.append((t.start, subscript))
        elif t.type == tokenize.OP and t.string in ")]}":
            if stack:
                stack.pop()
        elif t.type == tokenize.OP and t.string == ":" and stack and stack[-1][1]:
            slice_open.add(stack[-1][0])
        if t.type not in (tokenize.NL, tokenize.COMMENT):
            prev = t
    stack = []
    for k, t in enumerate(toks):
        if t.type == tokenize.OP and t.string in "([{":
            stack.append(t.start)
        elif t.type == tokenize.OP and t.string in ")]}":
            if stack:
                stack.pop()
        if t.type != tokenize.OP or t.string not in (",", ";"):
            continue
        row, col = t.start
        line = script[row - 1]
        nxt = toks[k + 1] if k + 1 < len(toks) else None
        if line[:col].strip() != "" and line[col - 1] in " \t":
            bad.add(row - 1)
        if t.string == "," and nxt is not None and nxt.start == t.end and nxt.type not in (
                tokenize.NEWLINE, tokenize.NL, tokenize.COMMENT) and nxt.string not in (")", "]", "}"):
            if not (stack and stack[-1] in slice_open):
                bad.add(row - 1)
        if t.string == ";" and nxt is not None and nxt.start[0] == row and nxt.type not in (
                tokenize.NEWLINE, tokenize.NL, tokenize.COMMENT):
            multi.add(row - 1)
    return {l for l in bad if mapped[l]}, {l for l in multi if mapped[l]}


def lint(script, where, tree):
    mapped = [w is not None for w in where]
    counts = {}

    def hit(check, n=1):
        if n:
            counts[check] = counts.get(check, 0) + n

    hit("trailing-whitespace", sum(1 for l, m in zip(script, mapped) if m and l and l[-1] in " \t"))
    hit("line-too-long", sum(1 for l, m in zip(script, mapped) if m and len(l) > MAX_LINE))
    bad, multi = whitespace_checks(script, mapped)
    hit("bad-whitespace", len(bad))
    hit("multiple-statements", len(multi))
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            hit("invalid-name", 0 if re.fullmatch(r"[a-z_][a-z0-9_]*", node.name) else 1)
        elif isinstance(node, ast.ClassDef):
            hit("invalid-name", 0 if re.fullmatch(r"_*[A-Z][A-Za-z0-9]*", node.name) else 1)
    for r in import_records(tree):
        if r["wildcard"]:
            hit("wildcard-import")
        elif r["module"] != "__future__":
            hit("unused-import", sum(1 for b in r["bound"] if not token_used(script, b, r["node"])))
    conv = {"trailing-whitespace", "line-too-long", "bad-whitespace", "multiple-statements", "invalid-name"}
    failed = {"convention": any(c in conv for c in counts),
              "warning": any(c not in conv for c in counts)}
    return counts, failed


# ------------------------------------------------------------------ metrics

def frac(i, n):
    return 0.0 if n == 1 else i / (n - 1)


def is_test(module):
    m = module.lstrip(".")
    for a in TEST_ALLOW:
        if m == a or m.startswith(a + "."):
            return True
    return any(s in m for s in TEST_SUBSTRINGS)


def notebook_metrics(path, py_files):
    doc = json.load(open(path, encoding="utf-8"))
    cells = []
    for i, c in enumerate(doc["cells"]):
        kind = c["cell_type"]
        cells.append(dict(kind=kind, index=i, lines=source_lines(c.get("source", "")),
                          count=counter(c) if kind == "code" else None))
    code = [c for c in cells if c["kind"] == "code"]
    mdc = [c for c in cells if c["kind"] == "markdown"]
    m = dict(code_cells=len(code), md_cells=len(mdc), raw_cells=sum(c["kind"] == "raw" for c in cells))

    seq = [c["count"] for c in code if not blank(c["lines"])]
    ints = [v for v in seq if v is not None]
    m["executed"] = any(c["count"] is not None for c in code)
    m["top_to_bottom"] = len(ints) >= 1 and ints == list(range(1, len(ints) + 1))

    python = is_python(doc)
    if python:
        script, where = extract(cells)
        tree = ast.parse("\n".join(script) + "\n")
        recs = import_records(tree)
        nonempty = [c["index"] for c in code if not blank(c["lines"])]
        positions = []
        for r in recs:
            cell = where[r["node"].lineno - 1][0]
            positions.append(frac(nonempty.index(cell), len(nonempty)))
        m["import_positions"] = positions
        m["imports_first_third_fraction"] = (
            sum(p <= 1 / 3 for p in positions) / len(positions) if positions else 1.0)
        defs = [n for n in ast.walk(tree) if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef))]
        m["has_function_def"] = any(not isinstance(n, ast.ClassDef) for n in defs)
        m["has_class_def"] = any(isinstance(n, ast.ClassDef) for n in defs)
        here = os.path.dirname(path)
        local = False
        for r in recs:
            seg = r["module"].lstrip(".").split(".")[0] or (r.get("names") or [""])[0]
            if seg and (os.path.join(here, seg + ".py") in py_files
                        or os.path.join(here, seg, "__init__.py") in py_files):
                local = True
        m["has_local_import"] = local
        m["has_test_import"] = any(is_test(r["module"]) for r in recs)
        m["lint_counts"], m["lint_category_failed"] = lint(script, where, tree)

    m["has_markdown"] = any(not blank(c["lines"]) for c in mdc)
    words = lines_ = 0
    hw = []
    for c in mdc:
        w, l = md_tokens(c["lines"])
        words += w
        lines_ += l
        hw += [md_line_words(h) for h in headings(c["lines"])]
    m["meaningful_md_words"], m["meaningful_md_lines"] = words, lines_
    m["md_heading_count"], m["md_heading_words"], m["heading_word_counts"] = len(hw), sum(hw), hw
    n = len(cells)
    m["md_cell_positions"] = [frac(c["index"], n) for c in mdc]
    m["code_cell_positions"] = [frac(c["index"], n) for c in code]

    status = []
    for k, c in enumerate(code):
        s = "empty" if blank(c["lines"]) else ("executed" if c["count"] is not None else "non_executed")
        status.append([frac(k, len(code)), s])
    m["cell_status_positions"] = status
    m["empty_cells"] = sum(s == "empty" for _, s in status)
    m["non_executed_cells"] = sum(s == "non_executed" for _, s in status)
    m["executed_cells"] = sum(s == "executed" for _, s in status)

    m["lines_per_cell"] = [len(c["lines"]) for c in cells]
    m["lines_per_code_cell"] = [len(c["lines"]) for c in code]
    m["lines_per_md_cell"] = [len(c["lines"]) for c in mdc]
    m["total_lines"] = sum(m["lines_per_cell"])
    m["code_lines"] = sum(m["lines_per_code_cell"])
    m["python"] = python
    return m


# ------------------------------------------------------------------ summary

def five(values):
    if not values:
        return None
    q = np.percentile(np.asarray(values, dtype=float), [0, 25, 50, 75, 100], method="linear")
    return [float(x) for x in q]


def hist(values):
    counts = [0] * 10
    for v in values:
        counts[min(int(v * 10), 9)] += 1
    thirds = [sum(v <= 1 / 3 for v in values), sum(1 / 3 < v <= 2 / 3 for v in values),
              sum(v > 2 / 3 for v in values)]
    return {"counts": counts, "thirds": thirds}


def summary(ms):
    py = [m for m in ms if m["python"]]
    ex = [m for m in ms if m["executed"]]
    withmd = [m for m in ms if m["has_markdown"]]

    def rate(pop, key):
        return [sum(1 for m in pop if m[key]), len(pop)]

    rates = {
        "executed": rate(ms, "executed"),
        "top_to_bottom": rate(ex, "top_to_bottom"),
        "bp4_compliant": [sum(1 for m in py if m["imports_first_third_fraction"] >= 1.0), len(py)],
        "function_def": rate(py, "has_function_def"),
        "class_def": rate(py, "has_class_def"),
        "local_import": rate(py, "has_local_import"),
        "test_import": rate(py, "has_test_import"),
        "md": rate(ms, "has_markdown"),
        "md_headings": [sum(1 for m in withmd if m["md_heading_count"] > 0), len(withmd)],
    }
    lint_rates = {c: [sum(1 for m in py if m["lint_category_failed"][c]), len(py)] for c in ("convention", "warning")}
    lint_rates["error"] = [0, 0]
    lint_rates["refactor"] = [0, 0]

    def flat(key):
        return [v for m in ms for v in m[key]]

    fives = {
        "code_cells": five([m["code_cells"] for m in ms]),
        "md_cells": five([m["md_cells"] for m in ms]),
        "meaningful_md_words": five([m["meaningful_md_words"] for m in ms]),
        "meaningful_md_lines": five([m["meaningful_md_lines"] for m in ms]),
        "md_heading_words": five([m["md_heading_words"] for m in ms]),
        "md_heading_words_per_heading": five(flat("heading_word_counts")),
        "empty_cells": five([m["empty_cells"] for m in ms]),
        "cells_per_notebook": five([m["code_cells"] + m["md_cells"] + m["raw_cells"] for m in ms]),
        "lines_per_cell": five(flat("lines_per_cell")),
        "lines_per_code_cell": five(flat("lines_per_code_cell")),
        "lines_per_md_cell": five(flat("lines_per_md_cell")),
        "lines_per_notebook": five([m["total_lines"] for m in ms]),
        "code_lines_per_notebook": five([m["code_lines"] for m in ms]),
    }
    status = [ps for m in ms for ps in m["cell_status_positions"]]
    hists = {
        "import_positions": hist([p for m in py for p in m["import_positions"]]),
        "md_cell_positions": hist(flat("md_cell_positions")),
        "code_cell_positions": hist(flat("code_cell_positions")),
        "executed_cell_positions": hist([p for p, s in status if s == "executed"]),
        "non_executed_cell_positions": hist([p for p, s in status if s == "non_executed"]),
        "empty_cell_positions": hist([p for p, s in status if s == "empty"]),
    }
    return {"n_notebooks": len(ms), "rates": rates, "lint_category_rates": lint_rates, "fives": fives,
            "histograms": hists}


def compute(root):
    nbs, py_files = [], set()
    for d, dirs, files in os.walk(root):
        dirs[:] = sorted(x for x in dirs if x not in (".ipynb_checkpoints", ".git"))
        for f in files:
            p = os.path.join(d, f)
            if f.endswith(".ipynb"):
                nbs.append(p)
            elif f.endswith(".py"):
                py_files.add(p)
    nbs.sort(key=lambda p: os.path.relpath(p, root))
    per = {}
    for p in nbs:
        per[os.path.relpath(p, root).replace(os.sep, "/")] = notebook_metrics(p, py_files)
    return {"notebooks": per, "summary": summary(list(per.values()))}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("corpus")
    g = ap.add_mutually_exclusive_group(required=True)
    g.add_argument("--emit", action="store_true")
    g.add_argument("--check", metavar="FROZEN")
    args = ap.parse_args()
    result = compute(args.corpus)
    if args.emit:
        json.dump(result, sys.stdout, indent=1, sort_keys=True)
        sys.stdout.write("\n")
        return 0
    frozen = json.load(open(args.check))
    fresh = json.loads(json.dumps(result))
    if fresh != frozen:
        print("oracle output differs from the frozen values", file=sys.stderr)
        return 1
    print("oracle matches frozen values for %d notebooks" % len(fresh["notebooks"]))
    return 0


if __name__ == "__main__":
    sys.exit(main())

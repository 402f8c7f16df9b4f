#!/usr/bin/env python3
"""Build the English test corpus from Python docstrings.

One document per module: its docstrings joined by blank lines. Docstrings
containing the default document sentinel ('$') or the delimiter are
skipped. The output is a single file using the default `%%DOC%%` delimiter
line, gzip-compressed.

Usage: make_english_corpus.py <out.txt.gz> <max_bytes> <source-dir>...

The checked-in corpus was made with

    make_english_corpus.py english.txt.gz 8000000 /usr/lib/python3.10 \
        <site-packages>/scipy <site-packages>/sklearn <site-packages>/numpy \
        <site-packages>/pandas <site-packages>/statsmodels <site-packages>/networkx
"""
import ast
import gzip
import os
import sys

SKIP_DIRS = {"test", "tests", "testing", "idlelib", "site-packages", "dist-packages", "lib2to3", "_vendor", "externals"}


def module_docs(path):
    try:
        with open(path, encoding="utf-8") as f:
            tree = ast.parse(f.read())
    except (SyntaxError, UnicodeDecodeError, ValueError):
        return []
    out = []
    for node in ast.walk(tree):
        if isinstance(node, (ast.Module, ast.ClassDef, ast.FunctionDef, ast.AsyncFunctionDef)):
            doc = ast.get_docstring(node)
            if doc and "$" not in doc and "%%DOC%%" not in doc:
                out.append(doc.strip())
    return out


def python_files(root):
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = sorted(d for d in dirnames if d not in SKIP_DIRS and not d.startswith("__"))
        for f in sorted(filenames):
            if f.endswith(".py"):
                yield os.path.join(dirpath, f)


def main():
    out, limit, roots = sys.argv[1], int(sys.argv[2]), sys.argv[3:]
    docs = []
    total = 0
    for root in roots:
        for path in python_files(root):
            parts = module_docs(path)
            if not parts:
                continue
            text = "\n\n".join(parts) + "\n"
            docs.append(text)
            total += len(text.encode("utf-8"))
            if total >= limit:
                break
        if total >= limit:
            break
    body = "%%DOC%%\n".join(docs)
    with gzip.GzipFile(out, "wb", mtime=0) as f:
        f.write(body.encode("utf-8"))
    print(f"{len(docs)} documents, {len(body.encode('utf-8'))} bytes")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Assemble a public English desk corpus and benchmark files from npm/PyPI data packages.

Sources are fetched with `npm pack` / `pip download` into <out>/raw, then flattened
into <out>/corpus.txt (documents separated by blank lines) plus the benchmark
files under <out>/bench/.
"""
import argparse
import glob
import json
import os
import re
import subprocess
import sys
import tarfile
import zipfile

NPM_PACKAGES = [
    "@stdlib/datasets-sotu",
    "@stdlib/datasets-spam-assassin",
    "@stdlib/datasets-moby-dick",
    "wordnet-db",
    "kjv",
    "world-english-bible",
    "websters-english-dictionary",
    "wordset-dictionary",
]



def fetch(raw):
    os.makedirs(raw, exist_ok=True)
    for pkg in NPM_PACKAGES:
        stem = pkg.lstrip("@").replace("/", "-")
        if glob.glob(os.path.join(raw, stem + "-*.tgz")):
            continue
        subprocess.run(["npm", "pack", pkg, "--silent"], cwd=raw, check=True)
    for wheel, spec in (("gensim-*.whl", "gensim==4.4.0"), ("mangoes-*.whl", "mangoes==3.1.0")):
        if not glob.glob(os.path.join(raw, wheel)):
            subprocess.run([sys.executable, "-m", "pip", "download", spec, "--no-deps",
                            "--only-binary=:all:", "-d", raw], check=True)
    for tgz in glob.glob(os.path.join(raw, "*.tgz")):
        dest = tgz[:-4]
        if not os.path.isdir(dest):
            with tarfile.open(tgz) as tf:
                tf.extractall(dest)


def paragraphs(text):
    for block in re.split(r"\n\s*\n", text):
        block = " ".join(block.split())
        if block:
            yield block


def docs_sotu(raw):
    for path in sorted(glob.glob(os.path.join(raw, "stdlib-datasets-sotu-*", "package", "data", "*.txt"))):
        with open(path, encoding="utf-8", errors="replace") as fh:
            yield from paragraphs(fh.read())


def docs_moby(raw):
    for path in glob.glob(os.path.join(raw, "stdlib-datasets-moby-dick-*", "package", "data", "data.txt")):
        with open(path, encoding="utf-8", errors="replace") as fh:
            yield from paragraphs(fh.read())


def docs_spam(raw):
    tag = re.compile(r"<[^>]*>")
    for path in sorted(glob.glob(os.path.join(raw, "stdlib-datasets-spam-assassin-*", "package", "data", "*", "*.txt"))):
        with open(path, encoding="utf-8", errors="replace") as fh:
            text = fh.read()
        body = text.split("\n\n", 1)[1] if "\n\n" in text else ""
        if "<html" in body.lower() or "base64" in body.lower():
            continue
        lines = [l for l in body.splitlines() if not l.startswith(">")]
        body = tag.sub(" ", "\n".join(lines))
        yield from paragraphs(body)


def docs_wordnet(raw):
    for path in sorted(glob.glob(os.path.join(raw, "wordnet-db-*", "package", "dict", "data.*"))):
        with open(path, encoding="utf-8", errors="replace") as fh:
            for line in fh:
                if line.startswith("  ") or "|" not in line:
                    continue
                gloss = line.split("|", 1)[1]
                gloss = gloss.replace('"', " ").replace(";", " ")
                yield " ".join(gloss.split())


def docs_kjv(raw):
    for path in glob.glob(os.path.join(raw, "kjv-*", "package", "json", "verses-1769.json")):
        with open(path, encoding="utf-8") as fh:
            verses = json.load(fh)
        chapter, buf = None, []
        for key, text in verses.items():
            ch = key.rsplit(":", 1)[0]
            if ch != chapter and buf:
                yield " ".join(buf)
                buf = []
            chapter = ch
            buf.append(text.replace("[", "").replace("]", ""))
        if buf:
            yield " ".join(buf)


def docs_web(raw):
    for path in sorted(glob.glob(os.path.join(raw, "world-english-bible-*", "package", "json", "*.json"))):
        with open(path, encoding="utf-8") as fh:
            items = json.load(fh)
        buf = []
        for it in items:
            if it.get("type") in ("paragraph end", "stanza end") and buf:
                yield " ".join(" ".join(buf).split())
                buf = []
            elif "value" in it:
                buf.append(it["value"])
        if buf:
            yield " ".join(" ".join(buf).split())


def docs_webster(raw):
    for path in glob.glob(os.path.join(raw, "websters-english-dictionary-*", "package", "dictionary.json")):
        with open(path, encoding="utf-8") as fh:
            entries = json.load(fh)
        for word in sorted(entries):
            yield " ".join(entries[word].split())


def docs_wordset(raw):
    for path in sorted(glob.glob(os.path.join(raw, "wordset-dictionary-*", "package", "data", "*.json"))):
        with open(path, encoding="utf-8") as fh:
            entries = json.load(fh)
        for word in sorted(entries):
            for m in entries[word].get("meanings", []):
                parts = [m.get("def", ""), m.get("example", "")]
                text = " ".join(" ".join(parts).split())
                if text:
                    yield text


def write_corpus(raw, out):
    sources = [docs_sotu, docs_moby, docs_spam, docs_wordnet, docs_kjv, docs_web,
               docs_webster, docs_wordset]
    ndocs = ntok = 0
    with open(out, "w", encoding="utf-8") as fh:
        for src in sources:
            for doc in src(raw):
                fh.write(doc)
                fh.write("\n\n")
                ndocs += 1
                ntok += len(doc.split())
    return ndocs, ntok


def write_bench(raw, bench):
    os.makedirs(bench, exist_ok=True)

    def dump(name, text):
        with open(os.path.join(bench, name), "w", encoding="utf-8") as fh:
            fh.write(text.replace("\r\n", "\n"))

    with zipfile.ZipFile(glob.glob(os.path.join(raw, "gensim-*.whl"))[0]) as zf:
        dump("simlex.txt", zf.read("gensim/test/test_data/simlex999.txt").decode("utf-8"))
        dump("google.txt", zf.read("gensim/test/test_data/questions-words.txt").decode("utf-8"))
    with zipfile.ZipFile(glob.glob(os.path.join(raw, "mangoes-*.whl"))[0]) as zf:
        root = "mangoes/resources/en/"
        for src, dst in (("ws353_similarity.txt", "ws_sim.txt"),
                         ("ws353_relatedness.txt", "ws_rel.txt"),
                         ("men.txt", "men.txt"), ("mturk.txt", "turk.txt")):
            dump(dst, zf.read(root + "similarity/" + src).decode("utf-8"))
        msr = sorted(n for n in zf.namelist()
                     if n.startswith(root + "analogy/msr/") and n.endswith(".txt"))
        dump("msr.txt", "".join(zf.read(n).decode("utf-8") for n in msr))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="/root/data")
    ap.add_argument("--no-fetch", action="store_true")
    args = ap.parse_args()
    raw = os.path.join(args.out, "raw")
    if not args.no_fetch:
        fetch(raw)
    ndocs, ntok = write_corpus(raw, os.path.join(args.out, "corpus.txt"))
    write_bench(raw, os.path.join(args.out, "bench"))
    print(f"documents={ndocs} whitespace_tokens={ntok}")


if __name__ == "__main__":
    main()

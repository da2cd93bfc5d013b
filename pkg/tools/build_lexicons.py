"""Regenerate the bundled lexicon TSVs.

Usage: python tools/build_lexicons.py VADER_LEXICON TEXTBLOB_DIR OUT_DIR

VADER_LEXICON is ``vader_lexicon.txt`` from the vaderSentiment wheel (MIT),
TEXTBLOB_DIR the ``textblob/en`` directory of the textblob wheel (MIT; the
sentiment XML originates from Pattern, BSD).
"""
import re
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

# Acknowledgment words that must stay affect-neutral so flat replies score 0.
NEUTRAL = {"ok", "okay", "yes", "yeah", "yep", "sure", "alright", "fine", "well",
           "like", "pretty", "please", "true", "agree", "agreed"}
MIN_ABS_VALENCE = 1.5
MIN_SUBJECTIVITY = 0.5


def main(vader_path, textblob_dir, out_dir):
    out_dir = Path(out_dir)
    words = set()
    for line in open(Path(textblob_dir) / "en-lexicon.txt", encoding="utf-8"):
        parts = line.split()
        if parts and not parts[0].startswith(";"):
            words.add(parts[0].lower())

    sentiment = {}
    for line in open(vader_path, encoding="utf-8"):
        token, score = line.split("\t")[:2]
        if not re.fullmatch(r"[a-z]{3,}", token) or token in NEUTRAL or token not in words:
            continue
        if abs(float(score)) >= MIN_ABS_VALENCE:
            sentiment[token] = round(float(score) / 4.0, 1)

    subj = {}
    root = ET.parse(Path(textblob_dir) / "en-sentiment.xml").getroot()
    for entry in root:
        form = entry.get("form", "").lower()
        if re.fullmatch(r"[a-z]{3,}", form) and form not in NEUTRAL:
            subj.setdefault(form, []).append(float(entry.get("subjectivity")))
    subjectivity = {k: round(sum(v) / len(v), 2) for k, v in subj.items()
                    if max(v) >= MIN_SUBJECTIVITY}

    with open(out_dir / "sentiment.tsv", "w", encoding="utf-8") as fh:
        for token in sorted(sentiment):
            fh.write(f"{token}\t{sentiment[token]}\n")
    with open(out_dir / "subjectivity.tsv", "w", encoding="utf-8") as fh:
        for token in sorted(subjectivity):
            fh.write(f"{token}\t{subjectivity[token]}\n")
    print(len(sentiment), len(subjectivity))


if __name__ == "__main__":
    main(*sys.argv[1:4])

"""Regenerate the bundled toy corpus. Deterministic: rerunning rewrites identical files.

Layout mirrors a CORD-19 release: metadata.csv plus one pdf_json file per parsed
paper. Topics come in both csv and xml form; vectors.txt is a document-level
embedding file holding one vector per paper and per topic field ("<id>:<field>").
"""
import csv
import json
import math
import pathlib
import random

HERE = pathlib.Path(__file__).parent
RNG = random.Random(19)
DIM = 8

THEMES = {
    "transmission": "transmission airborne droplets aerosol spread contact household superspreading incubation reproduction number contagious",
    "vaccine": "vaccine vaccination immunogenicity antibodies trial dose efficacy adjuvant mrna immune response",
    "treatment": "treatment antiviral remdesivir hydroxychloroquine dexamethasone therapy clinical outcomes mortality patients drug",
    "masks": "masks face coverings respirators n95 filtration protection healthcare workers personal protective equipment",
    "mental": "mental health anxiety depression lockdown isolation stress wellbeing psychological distress survey",
}
FILLER = "coronavirus covid sars cov study results analysis data cohort method evidence population risk model report".split()

TOPICS = [
    (1, "transmission", "airborne transmission", "How does the coronavirus spread through the air?",
     "Studies of aerosol and droplet transmission, household spread and superspreading events."),
    (2, "vaccine", "vaccine efficacy", "How effective are COVID-19 vaccines in trials?",
     "Clinical trials reporting vaccine efficacy, immunogenicity or antibody response after each dose."),
    (3, "treatment", "antiviral treatment outcomes", "Which antiviral drugs improve patient outcomes?",
     "Treatment studies of remdesivir, dexamethasone or hydroxychloroquine reporting mortality."),
    (4, "masks", "mask protection", "Do face masks protect healthcare workers?",
     "Filtration and protection of masks, respirators and other protective equipment."),
    (5, "mental", "mental health lockdown", "What is the psychological impact of lockdown?",
     "Surveys of anxiety, depression and stress during isolation and lockdown."),
]


def sentence(theme, n):
    words = THEMES[theme].split()
    out = [RNG.choice(words) if RNG.random() < 0.6 else RNG.choice(FILLER) for _ in range(n)]
    return " ".join(out).capitalize() + "."


def unit(v):
    norm = math.sqrt(sum(x * x for x in v))
    return [x / norm for x in v]


CENTROIDS = {t: unit([RNG.gauss(0, 1) for _ in range(DIM)]) for t in THEMES}


def vector(theme, noise):
    return [round(c + RNG.gauss(0, noise), 6) for c in CENTROIDS[theme]]


def main():
    json_dir = HERE / "pdf_json"
    json_dir.mkdir(exist_ok=True)
    for old in json_dir.glob("*.json"):
        old.unlink()

    theme_names = list(THEMES)
    docs = []
    for i in range(104):
        theme = theme_names[i % len(theme_names)]
        uid = f"t{i:04d}"
        sha = f"{RNG.getrandbits(64):016x}"
        title = sentence(theme, 6)[:-1]
        abstract = " ".join(sentence(theme, RNG.randint(8, 14)) for _ in range(2))
        has_json = i % 7 != 3
        if i in (11, 47):
            abstract = ""          # dropped at ingest
        docs.append((uid, sha, theme, title, abstract, has_json))

    with open(HERE / "metadata.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["cord_uid", "sha", "source_x", "title", "abstract", "publish_time", "pdf_json_files"])
        for uid, sha, theme, title, abstract, has_json in docs:
            path = f"{sha}.json" if has_json else ""
            w.writerow([uid, sha if has_json else "", "toy", title, abstract, "2020-05-01", path])
            if has_json:
                body = [{"text": sentence(theme, RNG.randint(10, 20)), "section": "Body"} for _ in range(3)]
                paper = {
                    "paper_id": sha,
                    "metadata": {"title": title, "authors": []},
                    "abstract": [{"text": abstract, "section": "Abstract"}] if abstract else [],
                    "body_text": body,
                }
                (json_dir / f"{sha}.json").write_text(json.dumps(paper, indent=1) + "\n")
        # a repeated row, ignored by the loader
        uid, sha, theme, title, abstract, has_json = docs[5]
        w.writerow([uid, sha, "toy", title, abstract, "2020-05-01", f"{sha}.json"])

    kept = [d for d in docs if d[4]]
    with open(HERE / "docids.txt", "w") as f:
        for d in kept:
            f.write(d[0] + "\n")

    with open(HERE / "topics.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["topic-id", "query", "question", "narrative"])
        for tid, _, q, qu, n in TOPICS:
            w.writerow([tid, q, qu, n])
    with open(HERE / "topics.xml", "w") as f:
        f.write("<topics>\n")
        for tid, _, q, qu, n in TOPICS:
            f.write(f'  <topic number="{tid}">\n    <query>{q}</query>\n'
                    f"    <question>{qu}</question>\n    <narrative>{n}</narrative>\n  </topic>\n")
        f.write("</topics>\n")

    with open(HERE / "qrels.txt", "w") as f:
        for tid, theme, *_ in TOPICS:
            for uid, _, dtheme, *_ in kept:
                if dtheme == theme:
                    grade = 2 if RNG.random() < 0.5 else 1
                elif RNG.random() < 0.1:
                    grade = 0
                else:
                    continue
                f.write(f"{tid} 0 {uid} {grade}\n")

    rows = [(uid, vector(theme, 0.6)) for uid, _, theme, *_ in kept]
    for tid, theme, *_ in TOPICS:
        for field in ("query", "question", "narrative"):
            rows.append((f"{tid}:{field}", vector(theme, 0.3)))
    with open(HERE / "vectors.txt", "w") as f:
        f.write(f"{len(rows)} {DIM}\n")
        for key, v in rows:
            f.write(key + " " + " ".join(repr(x) for x in v) + "\n")


if __name__ == "__main__":
    main()

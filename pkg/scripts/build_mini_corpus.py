"""Regenerate the miniature corpus bundled under src/skewlens/data/mini/.

Source sentences mark fragments as ``[[Technique|text]]``. The script strips
the markup, writes one article file per document, derives byte offsets for
the spans TSV, and labels a sentence ``propaganda`` iff it contains a
fragment. Two sets are written: ``train`` (municipal politics) and ``dev``
(energy and health coverage, a deliberately different topic mix).

    python scripts/build_mini_corpus.py
"""

from __future__ import annotations

import re
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "skewlens" / "data" / "mini"
MARK = re.compile(r"\[\[([^|\]]+)\|([^\]]+)\]\]")

TRAIN = {
    "7001": [
        "The city council met on Tuesday evening to discuss the downtown parking plan.",
        "Members debated for three hours before adjourning without a final vote.",
        "Councillor Reyes called the proposal [[Loaded_Language|a shameless giveaway to developers]] and walked out.",
        "Supporters argued the plan would bring new shops to empty storefronts.",
        "[[Flag-Waving|Real patriots of this city will never let outsiders pave over our heritage]], one resident said.",
        "The mayor's office said a revised draft would be published next month.",
        "Parking revenue fell by eight percent last year, according to the finance department.",
        "Local business owners asked for a delay until after the holiday season.",
        "[[Doubt|Can anyone honestly believe a word the planning office says anymore]]?",
        "A public hearing is scheduled for the first week of March.",
        "Transit advocates want part of the revenue to fund bus shelters.",
        "The council will vote on the final text in April.",
    ],
    "7002": [
        "Voters in the northern district head to the polls on Saturday.",
        "Turnout in the last municipal election was thirty-one percent.",
        "Candidate Ellison has promised to repair every road in the district within two years.",
        "Her opponent dismissed the pledge as [[Exaggeration,Minimisation|the biggest fantasy ever told in this county]].",
        "Both candidates attended a forum at the public library on Monday.",
        "Ellison said the district budget could cover the repairs without new taxes.",
        "[[Name_Calling,Labeling|Career swindler]] Ellison has no plan, a flyer distributed on Sunday claimed.",
        "Election officials reminded residents to bring photo identification.",
        "Polling stations will open at seven in the morning.",
        "[[Slogans|Take back our streets]], the crowd chanted outside the forum.",
        "Results are expected shortly after midnight.",
        "Observers from two civic groups will monitor the count.",
    ],
    "7003": [
        "The school board approved a new lunch menu for the spring term.",
        "The menu adds two vegetarian options and removes fried snacks.",
        "Parents were surveyed in January about the proposed changes.",
        "[[Bandwagon|Every sensible family in town already supports the new menu]], the board chair said.",
        "Some students said they preferred the old choices.",
        "Kitchen staff will receive training in the last week of February.",
        "Critics said the changes were [[Loaded_Language|a reckless experiment on our children]].",
        "The district nutritionist presented data on student meal participation.",
        "Costs are expected to rise by about four cents per meal.",
        "[[Black-and-White_Fallacy|Either we fix lunches now or we accept a generation of sick kids]], one board member warned.",
        "The board will review the menu again in September.",
        "Meal prices for families will not change this year.",
    ],
    "7004": [
        "A water main broke near the central market early on Friday.",
        "Crews worked through the night to restore service to four hundred homes.",
        "The utility said the pipe was installed more than seventy years ago.",
        "[[Causal_Oversimplification|This failure happened for one reason only: the last administration cut every maintenance budget]].",
        "Residents were advised to boil tap water until further notice.",
        "The market reopened on Saturday afternoon.",
        "[[Appeal_to_fear-prejudice|If nothing changes, every neighbourhood will soon be without safe water]], a union spokesman said.",
        "Engineers estimate that a fifth of the network needs replacement.",
        "The council has requested a full inspection report.",
        "[[Whataboutism|And what about the mayor's own pet projects that were funded while the pipes rotted]]?",
        "The inspection report is due within six weeks.",
        "Repair costs have not yet been estimated.",
    ],
}

DEV = {
    "8001": [
        "The regional grid operator reported record solar output in July.",
        "Battery storage capacity doubled compared with the previous summer.",
        "[[Loaded_Language|Greedy energy barons]] are blocking cheaper rooftop panels, activists said.",
        "Electricity prices for households remained stable over the quarter.",
        "The operator expects wind generation to grow further next year.",
        "[[Appeal_to_Authority|Every respected scientist agrees the new turbines are perfectly safe]], the minister declared.",
        "Two coastal substations will be upgraded before winter.",
        "Analysts noted that gas imports fell for the third month in a row.",
        "[[Repetition|Cheap power, cheap power, cheap power]] is all this government talks about, the opposition said.",
        "A new interconnector with the neighbouring grid opens in October.",
    ],
    "8002": [
        "Hospital waiting lists shortened slightly in the spring, new figures show.",
        "The health ministry hired three hundred additional nurses this year.",
        "[[Thought-terminating_Cliches|It is what it is]], a ministry official replied when asked about rural clinics.",
        "Vaccination rates among children remained above ninety percent.",
        "Pharmacists called for clearer guidance on seasonal flu shots.",
        "[[Straw_Men|Opponents apparently want hospitals to close their doors to the elderly]], the minister said of the reform critics.",
        "Emergency departments reported fewer overnight admissions in May.",
        "A review of ambulance response times is due next month.",
        "[[Reductio_ad_hitlerum|Only dictators ever tried to control doctors like this]], a surgeons' union leader claimed.",
        "The ministry plans to publish regional statistics every quarter.",
    ],
}


def build(name: str, docs: dict[str, list[str]], overlap_for: str | None = None) -> None:
    art_dir = OUT / name / "articles"
    art_dir.mkdir(parents=True, exist_ok=True)
    labels, spans = [], []
    for article_id, marked in docs.items():
        lines, offset = [], 0
        for idx, src in enumerate(marked, start=1):
            plain, pos, found = "", 0, []
            for m in MARK.finditer(src):
                plain += src[pos : m.start()]
                start = len(plain.encode("utf-8"))
                plain += m.group(2)
                found.append((m.group(1), start, len(plain.encode("utf-8"))))
                pos = m.end()
            plain += src[pos:]
            for technique, s, e in found:
                spans.append((article_id, technique, offset + s, offset + e))
            labels.append((article_id, idx, "propaganda" if found else "non-propaganda"))
            lines.append(plain)
            offset += len(plain.encode("utf-8")) + 1
        (art_dir / f"article{article_id}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if overlap_for is not None:
        # one fragment carrying two techniques over the identical range
        first = next(sp for sp in spans if sp[0] == overlap_for)
        spans.insert(spans.index(first) + 1, (first[0], "Name_Calling,Labeling", first[2], first[3]))
    with open(OUT / name / "labels.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{a}\t{i}\t{lab}\n" for a, i, lab in labels)
    with open(OUT / name / "spans.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{a}\t{t}\t{s}\t{e}\n" for a, t, s, e in spans)


if __name__ == "__main__":
    build("train", TRAIN, overlap_for="7001")
    build("dev", DEV)
    print(f"wrote {OUT}")

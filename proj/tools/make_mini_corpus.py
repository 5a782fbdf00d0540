#!/usr/bin/env python3
"""Regenerates the bundled synthetic mini corpus under data/mini/.

The mini corpus keeps the harness and the test suite runnable when the
official shared-task files (which require a usage agreement) are absent.
Class proportions mirror the official splits at roughly 1/10 scale.
"""

import random
from pathlib import Path

PLACES = [
    "springfield", "riverton", "lakeside county", "port aurora", "newbrook",
    "eastfield", "harborview", "milltown", "cedar falls", "northgate",
    "westbrook", "fairmont", "stonebridge", "oakdale", "southport",
]

INFORMATIVE = [
    "breaking {n} new covid-19 cases confirmed in {place} today as the official total rises to {total}",
    "{place} health department reports {n} deaths and {m} recoveries in the last 24 hours",
    "update {n} patients tested positive for coronavirus in {place} and {m} of them are in intensive care",
    "confirmed the first coronavirus case in {place} involves a patient who recently traveled from {place2}",
    "death toll in {place} climbs to {total} with {n} new fatalities reported overnight",
    "{n} more people recovered from covid-19 in {place} bringing total recoveries to {total}",
    "health officials say {n} suspected cases are under investigation in {place} after a local outbreak",
    "{place} records {n} new infections with {m} of them linked to travel history from {place2}",
    "officials in {place} confirm {n} cases tied to a care facility and {m} patients were hospitalized",
    "situation report {total} cumulative cases {n} deaths and {m} recoveries registered in {place}",
    "a resident of {place} who returned from {place2} has tested positive officials traced {n} contacts",
    "{place} reports its lowest daily count in weeks with only {n} new confirmed cases",
    "hospital in {place} says {n} of its {m} covid-19 patients have been discharged after recovery",
    "laboratory in {place} confirmed {n} positive samples out of {total} tested yesterday",
    "authorities announce {n} new suspected cases in {place} pending laboratory confirmation",
]

UNINFORMATIVE = [
    "i can't believe we're still in lockdown honestly this year is something else",
    "missing my friends so much right now stay safe everyone",
    "day {n} of quarantine and i have baked yet another banana bread",
    "anyone else's sleep schedule completely ruined or is it just me",
    "wash your hands wear a mask and please stop hoarding toilet paper",
    "my dog doesn't understand why i'm home all day but he's thrilled about it",
    "online classes are just not the same y'all i miss the library",
    "the daily briefings have basically become my new soap opera",
    "pro tip you can mute the word pandemic and your timeline becomes a garden",
    "me putting on real pants for the first time in {n} days felt illegal",
    "can we all agree that virtual birthday parties still count as parties",
    "i don't think my houseplants can take another motivational speech from me",
    "remember concerts remember restaurants remember handshakes good times",
    "that's it that's the tweet i just miss hugging people",
    "grocery shopping is now an extreme sport and i did not train for this",
    "if you need me i'll be watching bread rise like it's prime time television",
    "my quarantine hobby is starting hobbies and abandoning them within a week",
    "we're all just one sourdough starter away from becoming bakers now",
]

# used by both classes so the splits are not trivially separable
AMBIGUOUS = [
    "thinking about everyone in {place} tonight the news about the cases is a lot",
    "my cousin in {place} says the hospital situation is getting serious",
    "numbers out of {place} today are wild stay safe out there",
    "just saw the update from {place} and honestly i have no words",
    "{place} is on the news again this pandemic really is everywhere",
    "heard {place} might tighten restrictions after the latest report",
]

EMOJI = ["😷", "🙏", "❤️", "📈", "📉", "😂", "😭", "🏥", "💉", "👏", "🔥", "🙌"]
UNMAPPED_EMOJI = ["🦠", "🧟", "🪕"]
HASHTAGS = ["#covid19", "#coronavirus", "#stayhome", "#lockdown2020", "#quarantine"]
NONASCII = ["café", "méxico", "naïve", "über"]


def decorate(rng: random.Random, text: str) -> str:
    if rng.random() < 0.18:
        text = f"rt @user{rng.randint(1, 999)}: " + text
    if rng.random() < 0.25:
        text += " " + rng.choice(HASHTAGS)
        if rng.random() < 0.4:
            text += " " + rng.choice(HASHTAGS)
    if rng.random() < 0.38:
        text += " " + rng.choice(EMOJI)
    if rng.random() < 0.08:
        text += " " + rng.choice(UNMAPPED_EMOJI)
    if rng.random() < 0.30:
        text += f" https://t.co/{''.join(rng.choices('abcdefghjkmnpqrstuvwxyz23456789', k=8))}"
    if rng.random() < 0.10:
        text += " " + rng.choice(NONASCII)
    if rng.random() < 0.15:
        text = text.replace("'", "’", 1)
    return text


def fill(rng: random.Random, template: str) -> str:
    place = rng.choice(PLACES)
    place2 = rng.choice([p for p in PLACES if p != place])
    return template.format(
        n=rng.randint(2, 95),
        m=rng.randint(1, 40),
        total=rng.randint(100, 9000),
        place=place,
        place2=place2,
    )


def make_split(rng, prefix: str, n_informative: int, n_uninformative: int):
    rows = []
    for i in range(n_informative):
        pool = AMBIGUOUS if rng.random() < 0.10 else INFORMATIVE
        rows.append((f"{prefix}I{i + 1:04d}",
                     decorate(rng, fill(rng, rng.choice(pool))),
                     "INFORMATIVE"))
    for i in range(n_uninformative):
        pool = AMBIGUOUS if rng.random() < 0.10 else UNINFORMATIVE
        rows.append((f"{prefix}U{i + 1:04d}",
                     decorate(rng, fill(rng, rng.choice(pool))),
                     "UNINFORMATIVE"))
    rng.shuffle(rows)
    return rows


def write_tsv(path: Path, rows) -> None:
    with path.open("w", encoding="utf-8") as f:
        f.write("Id\tText\tLabel\n")
        for row in rows:
            assert "\t" not in row[1] and "\n" not in row[1]
            f.write("\t".join(row) + "\n")


def main() -> None:
    rng = random.Random(42)
    out_dir = Path(__file__).resolve().parent.parent / "data" / "mini"
    out_dir.mkdir(parents=True, exist_ok=True)
    write_tsv(out_dir / "train.tsv", make_split(rng, "T", 330, 370))
    write_tsv(out_dir / "valid.tsv", make_split(rng, "V", 47, 53))
    print("wrote", out_dir / "train.tsv", "and", out_dir / "valid.tsv")


if __name__ == "__main__":
    main()

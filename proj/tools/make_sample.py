#!/usr/bin/env python3
"""Regenerates the synthetic sample fixtures.

  sample/discussion.csv   60 posts from 6 students (10 each, two semesters)
  sample/human.csv        reference coding of the same posts

The reference coding is the code set each post was generated from, with a few
deliberate omissions so the automated coding cannot agree perfectly. Some
off-topic sentences contain instructor keywords ("practice", "difficult") and
produce the presence-based false positives a human coder would not mark.
"""

import argparse
import csv
import random
from datetime import datetime, timedelta
from pathlib import Path

CODES = ["effort", "beyondLS", "illusions", "retrieval-interleave"]

POOLS = {
    "effort": [
        "Desirable difficulties made me fail forward on the first quiz.",
        "Struggling with a problem before seeing the answer felt slow, but the learning stuck.",
        "I now see mistakes as part of effortful learning rather than as failure.",
        "The desirable difficulty of generating an answer first made the idea more durable.",
        "Making mistakes early helped me understand the material more deeply.",
        "Effortful learning feels harder in the moment but pays off later.",
        "Trying to solve the problem before knowing the solution was hard and useful.",
        "Short-term struggle is a desirable difficulty when the goal is durable learning.",
    ],
    "beyondLS": [
        "I always believed I was a visual learner, but the evidence on learning styles is weak.",
        "Matching instructional style to the content works better than matching it to learning styles.",
        "Our training team still sorts staff by learning styles, which the research does not support.",
        "When the instructional style fits the subject, everyone seems to learn better.",
        "Individual preferences matter less than the nature of the content being taught.",
        "The dyslexia discussion showed that a learning difference is not a learning style.",
        "Learning styles inventories are popular in my district despite the findings.",
    ],
    "illusions": [
        "Rereading the chapter gave me an illusion of mastery that vanished on the test.",
        "Cramming the night before felt productive, but it was an illusion of knowing.",
        "Familiarity with the slides is easy to confuse with real understanding.",
        "My confidence was higher than my accuracy when I checked my answers.",
        "Calibration exercises showed how often I misjudge what I actually know.",
        "Highlighting and rereading created a misunderstanding about how much I had learned.",
        "Students cram before exams because it feels like mastery.",
    ],
    "retrieval-interleave": [
        "I used spaced out practice daily and the retrieval felt easier each week.",
        "Short quizzes at the start of each meeting are a simple form of retrieval practice.",
        "Interleaving different problem types forced me to choose the right strategy.",
        "Flash cards spread over several days beat one long study session.",
        "Massed practice feels efficient, but spaced retrieval lasts longer.",
        "Our team now uses low stakes quizzing to help people recall the information.",
        "Mixing topics within one session felt confusing at first.",
        "Periodically testing myself on old chapters kept the ideas fresh.",
    ],
    None: [
        "The lecture format in my classroom still dominates most sessions.",
        "As a former surgeon, I found the parachute landing fall example memorable.",
        "Thanks for sharing, Maria, your point about the budget was helpful.",
        "Our organization is planning a new onboarding program for next year.",
        "I agree with the earlier post about the workload this semester.",
        "This week was busy, but I finally finished the readings.",
        "Our legal practice group meets every Friday to review cases.",
        "It was difficult to find time for the readings with Jordan out of the office.",
    ],
}

# per-student code propensities (effort, beyondLS, illusions, retrieval-interleave)
PROFILES = [
    (0.6, 0.0, 0.0, 0.7),
    (0.0, 0.7, 0.3, 0.0),
    (0.5, 0.0, 0.6, 0.5),
    (0.0, 0.5, 0.0, 0.4),
    (0.3, 0.2, 0.2, 0.6),
    (0.0, 0.0, 0.6, 0.5),
]


def make_posts(n_users, posts_per_user, rng, first_id=1001):
    users = [f"s{101 + u}" for u in range(n_users)]
    rows = []
    entry = first_id
    for i in range(posts_per_user):
        for u, user in enumerate(users):
            profile = PROFILES[u % len(PROFILES)]
            codes = [c for c, p in zip(CODES, profile) if rng.random() < p * 0.7]
            sentences = []
            for c in codes:
                sentences.append(rng.choice(POOLS[c]))
            if not codes or rng.random() < 0.35:
                sentences.insert(rng.randrange(len(sentences) + 1), rng.choice(POOLS[None]))
            semester = "F21" if i < posts_per_user // 2 else "S22"
            start = datetime(2021, 9, 1) if semester == "F21" else datetime(2022, 1, 10)
            k = i % (posts_per_user // 2 or 1)
            stamp = (start + timedelta(days=3 * k, hours=9 + u, minutes=(7 * i) % 60)).isoformat()
            human = {c: int(c in codes) for c in CODES}
            # a human coder occasionally leaves a weakly expressed code unmarked
            for c in codes:
                if rng.random() < 0.06:
                    human[c] = 0
            rows.append((entry, user, stamp, " ".join(sentences), semester, human))
            entry += 1
    return rows


def write(rows, discussion, human):
    discussion.parent.mkdir(parents=True, exist_ok=True)
    with discussion.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["entry_id", "user_id", "timestamp", "text", "semester"])
        for entry, user, stamp, text, semester, _ in rows:
            w.writerow([entry, user, stamp, text, semester])
    if human is None:
        return
    with human.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["entry_id", "user_id", "timestamp", "text", *CODES])
        for entry, user, stamp, text, _, flags in rows:
            w.writerow([entry, user, stamp, text, *(flags[c] for c in CODES)])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "sample")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--users", type=int, default=6)
    ap.add_argument("--posts-per-user", type=int, default=10)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    rows = make_posts(args.users, args.posts_per_user, rng)
    write(rows, args.out / "discussion.csv", args.out / "human.csv")


if __name__ == "__main__":
    main()

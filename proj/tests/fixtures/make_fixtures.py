#!/usr/bin/env python3
"""Regenerates the bundled test fixtures.

usage: make_fixtures.py path/to/honeygen

  replay_a/        one recorded response per block triple for type A
  robots_corpus/   50 robots.txt files of assorted shapes
  honeywords_b/    30 type B responses plus labels.json

Output is deterministic; rerunning rewrites identical files.
"""
import json
import pathlib
import random
import subprocess
import sys

HERE = pathlib.Path(__file__).resolve().parent
PROVIDER = "fixture-llm"
INPUT_A = (HERE / "input_a.txt").read_text().strip()

WORDS = [l for l in (HERE.parents[1] / "data/wordlists/common.txt").read_text().split("\n")
         if l and not l.startswith("#")]
OTHER = ["catalog", "checkout-v2", "partners", "investor", "careers", "press-kit", "b2b",
         "legacy", "beta", "intranet", "hr", "payroll", "finance", "crm", "erp", "sso",
         "metrics", "grafana", "jenkins", "gitlab", "old-site", "archive", "quarterly", "q3"]
AGENTS = ["*", "Googlebot", "Bingbot", "GPTBot", "AhrefsBot", "Baiduspider", "YandexBot"]


def path(rng):
    depth = rng.choice([1, 1, 1, 2, 2, 3])
    segs = [rng.choice(WORDS if rng.random() < 0.6 else OTHER) for _ in range(depth)]
    p = "/" + "/".join(segs)
    r = rng.random()
    if r < 0.15:
        p += "/"
    elif r < 0.22:
        p += "/*.php"
    elif r < 0.27:
        p += "?id=*"
    return p


def robots_body(rng, comments=True):
    lines = []
    if comments and rng.random() < 0.5:
        lines.append("# robots.txt for " + rng.choice(["shop.example.com", "example.org", "portal.example.net"]))
    for g in range(rng.choice([1, 1, 2, 3])):
        agents = rng.sample(AGENTS, rng.choice([1, 1, 2]))
        if g == 0 and "*" not in agents:
            agents = ["*"] + agents[:1]
        for a in agents:
            lines.append("User-agent: " + a)
        if rng.random() < 0.2:
            lines.append("Crawl-delay: " + str(rng.choice([1, 5, 10])))
        for _ in range(rng.randint(0, 4)):
            lines.append("Allow: " + path(rng))
        for _ in range(rng.randint(1, 14)):
            lines.append("Disallow: " + path(rng))
        lines.append("")
    if rng.random() < 0.5:
        lines.append("Sitemap: https://www.example.com/sitemap.xml")
    return "\n".join(lines).rstrip("\n") + "\n"


def replay_a(binary):
    out = HERE / "replay_a"
    for f in out.glob("*.json"):
        f.unlink()
    listing = subprocess.run([binary, "prompts", "--type", "A", "--input", INPUT_A,
                              "--provider", PROVIDER], check=True, capture_output=True, text=True)
    rng = random.Random(2024)
    for line in listing.stdout.splitlines():
        entry = json.loads(line)
        body = robots_body(rng)
        shape = rng.random()
        if shape < 0.08:
            text = rng.choice(["I'm sorry, but I can't help with creating deceptive files.",
                               "As an AI language model, I am unable to generate that content."])
        elif shape < 0.25:
            text = "Here is a robots.txt file for the website:\n\n" + body + "\nLet me know if you need changes."
        elif shape < 0.35:
            text = "```\n" + body + "```\n"
        else:
            text = body
        (out / (entry["key"] + ".json")).write_text(json.dumps({
            "key": entry["key"], "provider": PROVIDER, "prompt_text": entry["prompt_text"],
            "response_text": text, "finish_reason": "complete"}, indent=2) + "\n")


def robots_corpus():
    out = HERE / "robots_corpus"
    for f in out.glob("*.robots.txt"):
        f.unlink()
    rng = random.Random(50)
    for i in range(50):
        body = robots_body(rng)
        if i % 7 == 3:
            body = body.replace("Disallow:", "disallow:").replace("User-agent:", "USER-AGENT:")
        if i % 11 == 5:
            body = body.replace("\n", "\r\n")
        if i % 13 == 4:
            body = body.replace("Disallow: ", "Disallow:")
        if i % 9 == 2:
            body = body.rstrip("\n") + "\nDisallow: /admin # keep out\nAllow:\n"
        (out / f"site{i:02d}.example.robots.txt").write_text(body, newline="")


FIRST = ["alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi", "ivan", "judy",
         "mallory", "nia", "oscar", "peggy", "rupert", "sybil", "trent", "uma", "victor", "wendy",
         "xena", "yusuf", "zoe"]


def pairs(rng, n):
    users = rng.sample(FIRST, min(n, len(FIRST)))
    while len(users) < n:
        users.append(rng.choice(FIRST) + str(rng.randint(10, 99)))
    out = []
    for u in users:
        pw = rng.choice(["Sunshine", "dragon", "Qwerty", "Monkey", "letmein", "Summer", "Shadow"])
        pw += rng.choice(["", "!", "#"]) + str(rng.randint(1, 2024))
        out.append((u + rng.choice(["", ".smith", "_88", "2023"]), pw))
    return out


def render(rng, ps, style):
    if style == "colon":
        return "\n".join(f"{u}:{p}" for u, p in ps)
    if style == "numbered":
        return "\n".join(f"{i + 1}. {u}:{p}" for i, (u, p) in enumerate(ps))
    if style == "bold":
        return "\n".join(f"{i + 1}. **{u}** - {p}" for i, (u, p) in enumerate(ps))
    if style == "table":
        rows = ["| Username | Password |", "|----------|----------|"]
        rows += [f"| {u} | {p} |" for u, p in ps]
        return "\n".join(rows)
    if style == "csv":
        return "username,password\n" + "\n".join(f"{u},{p}" for u, p in ps)
    if style == "tab":
        return "\n".join(f"{u}\t{p}" for u, p in ps)
    if style == "bullets":
        return "\n".join(f"- {u} | {p}" for u, p in ps)
    if style == "twoline":
        return "\n\n".join(f"Username: {u}\nPassword: {p}" for u, p in ps)
    if style == "labelled":
        return "\n".join(f"{i + 1}) Username: {u}, Password: {p}" for i, (u, p) in enumerate(ps))
    raise ValueError(style)


STYLES = ["colon", "numbered", "bold", "table", "csv", "tab", "bullets", "twoline", "labelled", "numbered"]
NONE_TEXTS = [
    "I'm sorry, but I can't help with generating credentials that could be used to deceive people.",
    "I cannot create username and password pairs. Creating fake credentials may violate policy.",
    "Sure! Good passwords are long, unique and stored in a password manager. Avoid reusing them.",
    "Here are some password ideas:\nSunshine2023!\ndragon#88\nQwerty1234\nMonkey!77",
    "As an AI, I am unable to fulfil this request.",
    "The user's information suggests a name and birthday. I would recommend using a passphrase instead.",
    "",
    "Username and password pairs:\n(none could be generated from the given information)",
    "1. Use a mix of upper and lower case letters.\n2. Add digits and symbols.\n3. Never reuse passwords.",
    "Unfortunately this request cannot be completed.",
]


def honeywords_b():
    out = HERE / "honeywords_b"
    for f in out.glob("*.txt"):
        f.unlink()
    rng = random.Random(20)
    labels = {}
    for i in range(10):
        style = STYLES[i]
        body = render(rng, pairs(rng, 20), style)
        if i % 3 == 0:
            body = "Here are 20 username and password pairs:\n\n" + body + "\n\nLet me know if you need more."
        labels[f"b{i:02d}_exact.txt"] = ("exact", body)
    for i in range(10):
        style = STYLES[(i + 3) % len(STYLES)]
        n = [19, 10, 5, 1, 12, 18, 3, 7, 15, 2][i]
        body = render(rng, pairs(rng, n), style)
        if i % 4 == 1:
            body = "I could only come up with a few:\n" + body
        labels[f"b{i + 10:02d}_fewer.txt"] = ("fewer", body)
    for i in range(10):
        labels[f"b{i + 20:02d}_none.txt"] = ("none", NONE_TEXTS[i])
    for name, (_, body) in labels.items():
        (out / name).write_text(body + ("\n" if body else ""))
    (out / "labels.json").write_text(json.dumps({k: v[0] for k, v in sorted(labels.items())}, indent=1) + "\n")


if __name__ == "__main__":
    replay_a(sys.argv[1])
    robots_corpus()
    honeywords_b()

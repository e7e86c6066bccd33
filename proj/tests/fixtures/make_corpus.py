#!/usr/bin/env python3
"""Regenerates the synthetic fixture corpus under tests/fixtures/corpus.

30 ham messages (one .eml per file) and 30 phishing messages (one mbox).
The two classes are built to be separable: every phishing message has an
HTML part, a raw-IP link and several of the keyword features; no ham message
has any of these.  Output is deterministic.
"""

import base64
import quopri
import random
from email.utils import format_datetime
from datetime import datetime, timedelta, timezone
from pathlib import Path

HERE = Path(__file__).resolve().parent
OUT = HERE / "corpus"
rng = random.Random(20180101)

FIRST = ["alice", "brian", "chen", "dana", "elif", "farid", "gwen", "hugo", "ines", "jonas"]
LAST = ["moreau", "okafor", "lindqvist", "tanaka", "rossi", "novak", "haddad", "silva"]
TEAMS = ["build", "infra", "design", "research", "support", "editorial"]
DAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"]
HAM_SITES = ["www.python.org", "lists.debian.org", "github.com", "en.wikipedia.org", "www.gnu.org"]

HAM_TEMPLATES = [
    ("Notes from the {team} sync",
     "Hi all,\n\nThanks for joining the {team} sync on {day}. We walked through the open "
     "tickets and agreed to move the release to next week so the new tests can land.\n\n"
     "Action items:\n- {a} will draft the migration plan\n- {b} owns the benchmark numbers\n\n"
     "Cheers,\n{a}\n"),
    ("Lunch on {day}?",
     "Hey {b},\n\nAre you free for lunch on {day}? There is a new noodle place near the "
     "station that {a} keeps talking about. Around noon works for me.\n\n{a}\n"),
    ("Draft of the quarterly write-up",
     "Hello {b},\n\nI attached my comments inline below. The section on storage costs reads "
     "well; the chart on page four needs a legend. Could you send the next draft by {day}?\n\n"
     "> The team shipped three features this quarter.\n\nNice summary.\n\n{a}\n"),
    ("Reading group: chapter {n}",
     "Hi everyone,\n\nThis week we read chapter {n}. Bring one question about the proofs in "
     "the second half. Background material is at https://{site}/docs/reading-{n}.html if you "
     "want a refresher.\n\nSee you {day},\n{a}\n"),
    ("Re: flaky test in the {team} pipeline",
     "{b} wrote:\n> The integration job timed out twice today.\n\nI think the timeout comes "
     "from the mirror being slow. I pinned the mirror in the config and reran it three times "
     "without trouble. Logs are on https://{site}/{team}/runs/{n}.\n\n{a}\n"),
    ("Photos from the weekend",
     "Hi {b},\n\nHere are the photos from the hike. The view from the ridge was worth the "
     "early start. Let me know which ones you want printed.\n\nBest,\n{a}\n"),
]

HAM_HTML = (
    "<html><body><h2>{team} newsletter, issue {n}</h2>"
    "<p>Hello readers,</p><p>This issue covers the new build cache, a short interview with "
    "{a}, and the schedule for the {day} talks.</p>"
    "<p>Read the full story on <a href=\"https://{site}/news/{n}\">our site</a>.</p>"
    "<p>Thanks for reading.</p></body></html>"
)

PHISH_SUBJECTS = [
    "Your PayPal account has been suspended",
    "Urgent: verify your bank account",
    "Action required: login to restore access",
    "Security alert for your account",
    "Final notice: account suspension",
    "Please verify your identity",
]

PHISH_BODIES = [
    "<p>Dear Customer,</p><p>We noticed unusual activity on your PayPal account. Your account "
    "has been suspended until you verify your information.</p>"
    "<p><a href=\"{ip_url}\">https://www.paypal.com/signin</a></p>"
    "<p>If you do not login within 48 hours, you agree that your account will be closed.</p>",

    "<p>Dear valued member,</p><p>Your bank has limited your online banking account. To "
    "verify your account, please login using the secure link below.</p>"
    "<p><a href=\"{ip_url}\"><img src=\"{img_url}\" alt=\"Login\"></a></p>"
    "<p>By continuing you agree to the updated terms. Failure to verify will suspend access.</p>",

    "<p>Dear Client,</p><p>Our records show your account details are out of date. Login now "
    "to verify your identity: <a href=\"{hex_url}\">https://secure.bank.com/verify</a></p>"
    "<p>Accounts that are not verified will be suspended. Your bank security team.</p>",

    "<p>Dear PayPal user,</p><p>We were unable to verify your recent payment. Please "
    "<a href=\"{ip_url}\">login to your account</a> and confirm your billing information.</p>"
    "<p>You must agree to the new policy, or your account will be suspended. Visit {ip_url} "
    "if the link does not work.</p>",

    "<p>Dear account holder,</p><p>Your bank account will be suspended due to a security "
    "update. <a href=\"{hex_url}\"><img src=\"{img_url}\"></a></p>"
    "<p>Login and verify within 24 hours. By logging in you agree to our terms.</p>",
]

IP_HOSTS = ["203.0.113.{}", "198.51.100.{}", "192.0.2.{}"]


def ip_url():
    host = rng.choice(IP_HOSTS).format(rng.randint(2, 250))
    path = rng.choice(["paypal.com/cgi-bin/webscr", "login/verify.php", "bank/secure/update.html"])
    return f"http://{host}/{path}?cmd=_login&id={rng.randint(1000, 9999)}"


def hex_url():
    ip = [203, 0, 113, rng.randint(2, 250)]
    hexhost = "0x" + "".join(f"{o:02x}" for o in ip)
    return f"http://{hexhost}/%70%61%79%70%61%6c/verify.php?session={rng.randint(10**5, 10**6)}"


def img_url():
    return f"http://{rng.choice(IP_HOSTS).format(rng.randint(2, 250))}/img/logo{rng.randint(1, 9)}.gif"


def fill(template, n):
    a = rng.choice(FIRST).capitalize()
    b = rng.choice([f for f in FIRST if f.capitalize() != a]).capitalize()
    return template.format(team=rng.choice(TEAMS), day=rng.choice(DAYS), a=a, b=b, n=n,
                           site=rng.choice(HAM_SITES))


def headers(sender, to, subject, when, extra):
    lines = [
        f"From: {sender}",
        f"To: {to}",
        f"Subject: {subject}",
        f"Date: {format_datetime(when)}",
        f"Message-ID: <{rng.getrandbits(64):016x}@{sender.split('@')[1].rstrip('>')}>",
        "MIME-Version: 1.0",
    ]
    return "\n".join(lines + extra)


def ham_message(i, when):
    a, b = rng.sample(FIRST, 2)
    sender = f"{a.capitalize()} {rng.choice(LAST).capitalize()} <{a}@example.org>"
    to = f"{b}@example.org"
    if i % 7 == 3:
        subject = fill("{team} newsletter", i)
        html = fill(HAM_HTML, i)
        body = html
        head = headers(sender, to, subject, when, ["Content-Type: text/html; charset=utf-8"])
        return head + "\n\n" + body + "\n"
    subject_t, body_t = HAM_TEMPLATES[i % len(HAM_TEMPLATES)]
    a_name = a.capitalize()
    b_name = b.capitalize()
    ctx = dict(team=rng.choice(TEAMS), day=rng.choice(DAYS), a=a_name, b=b_name, n=i + 1,
               site=rng.choice(HAM_SITES))
    subject = subject_t.format(**ctx)
    body = body_t.format(**ctx)
    if i % 5 == 1:
        encoded = quopri.encodestring(body.encode("utf-8")).decode("ascii")
        head = headers(sender, to, subject, when,
                       ["Content-Type: text/plain; charset=utf-8",
                        "Content-Transfer-Encoding: quoted-printable"])
        return head + "\n\n" + encoded
    return headers(sender, to, subject, when, ["Content-Type: text/plain; charset=us-ascii"]) + "\n\n" + body


def phish_message(i, when):
    domain = rng.choice(["paypa1-support.com", "secure-bank-alerts.net", "account-review.info"])
    sender = f"Service <no-reply@{domain}>"
    to = f"{rng.choice(FIRST)}@example.org"
    subject = PHISH_SUBJECTS[i % len(PHISH_SUBJECTS)]
    html = "<html><body>" + PHISH_BODIES[i % len(PHISH_BODIES)].format(
        ip_url=ip_url(), hex_url=hex_url(), img_url=img_url()) + "</body></html>"
    if i % 3 == 0:
        boundary = f"=_b{rng.getrandbits(32):08x}"
        text = ("Dear customer, your account requires verification. "
                f"Open {ip_url()} to login.\n")
        encoded = base64.encodebytes(html.encode("utf-8")).decode("ascii")
        head = headers(sender, to, subject, when,
                       [f'Content-Type: multipart/alternative; boundary="{boundary}"'])
        return (head + "\n\nThis is a multi-part message in MIME format.\n\n"
                f"--{boundary}\nContent-Type: text/plain; charset=us-ascii\n\n{text}\n"
                f"--{boundary}\nContent-Type: text/html; charset=utf-8\n"
                f"Content-Transfer-Encoding: base64\n\n{encoded}\n--{boundary}--\n")
    if i % 3 == 1:
        encoded = quopri.encodestring(html.encode("utf-8")).decode("ascii")
        head = headers(sender, to, subject, when,
                       ["Content-Type: text/html; charset=iso-8859-1",
                        "Content-Transfer-Encoding: quoted-printable"])
        return head + "\n\n" + encoded + "\n"
    return headers(sender, to, subject, when, ["Content-Type: text/html; charset=utf-8"]) + "\n\n" + html + "\n"


def mbox_escape(body):
    return "\n".join(">" + line if line.startswith("From ") else line for line in body.split("\n"))


def main():
    start = datetime(2017, 3, 1, 9, 0, tzinfo=timezone.utc)
    ham_dir = OUT / "ham"
    ham_dir.mkdir(parents=True, exist_ok=True)
    for old in ham_dir.glob("*.eml"):
        old.unlink()
    for i in range(30):
        msg = ham_message(i, start + timedelta(hours=7 * i))
        (ham_dir / f"ham_{i + 1:02d}.eml").write_text(msg, encoding="utf-8")

    chunks = []
    for i in range(30):
        when = start + timedelta(hours=5 * i + 2)
        msg = phish_message(i, when)
        stamp = when.strftime("%a %b %d %H:%M:%S %Y")
        chunks.append(f"From MAILER-DAEMON {stamp}\n" + mbox_escape(msg.rstrip("\n")) + "\n")
    (OUT / "phish.mbox").write_text("\n".join(chunks), encoding="utf-8")

    single = phish_message(1, start + timedelta(days=40)).replace(
        "Subject: ", "Subject: [fixture] ", 1)
    (HERE / "fixture_phish.eml").write_text(single, encoding="utf-8")


if __name__ == "__main__":
    main()

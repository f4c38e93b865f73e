"""Regenerates the small corpora and resources under tests/fixtures.

Vignette texts are hand-written. The root verb of each sentence is marked
as [form/lemma]; a sentence without a marker has no verb. Vectors come from
a seeded generator so that classes are separable but noisy.
"""

import csv
import hashlib
import json
import random
import re
from pathlib import Path

HERE = Path(__file__).resolve().parent

CHADWICK = {
    ("honest", "pos"): [
        "A cashier [returns/return] the extra change to a customer.",
        "Sam [admits/admit] breaking the window to the neighbor.",
        "A student [reports/report] the grading mistake in her favor.",
        "The seller [tells/tell] the buyer about the scratch on the car.",
        "A boy [confesses/confess] that he ate the last cookie.",
    ],
    ("dishonest", "neg"): [
        "A man [lies/lie] to his boss about being sick.",
        "Maria [cheats/cheat] on the final exam with hidden notes.",
        "A clerk [fakes/fake] the numbers on the sales report.",
        "The dealer [hides/hide] the damage from the buyer.",
        "A player [pretends/pretend] to be fouled to win a penalty.",
    ],
    ("loyal", "pos"): [
        "Tom [defends/defend] his friend when others mock him.",
        "A worker [stays/stay] with the small firm through hard times.",
        "Ana [keeps/keep] the secret her sister trusted her with.",
        "The fan [supports/support] the team after every loss.",
        "A soldier [stands/stand] by his unit under fire.",
    ],
    ("disloyal", "neg"): [
        "A man [betrays/betray] his partner to the rivals.",
        "Lisa [leaks/leak] the team plans to a competitor.",
        "The captain [abandons/abandon] his crew during the storm.",
        "A friend [spreads/spread] gossip about Joe behind his back.",
        "The player [switches/switch] sides for a bigger bribe.",
    ],
    ("friendly", "pos"): [
        "A woman [greets/greet] the new neighbor with a warm smile.",
        "Ben [invites/invite] the lonely classmate to lunch.",
        "The host [welcomes/welcome] every guest at the door.",
        "A stranger [helps/help] a lost tourist with directions.",
        "Kim [chats/chat] kindly with the shy newcomer.",
    ],
    ("unfriendly", "neg"): [
        "A man [ignores/ignore] his neighbor who waves hello.",
        "The waiter [snaps/snap] rudely at a polite guest.",
        "Jen [slams/slam] the door on the visiting family.",
        "A boy [mocks/mock] the new kid on the bus.",
        "The clerk [glares/glare] at the customer and turns away.",
    ],
    ("cooperative", "pos"): [
        "The team [shares/share] the workload to meet the deadline.",
        "Two neighbors [build/build] a fence together.",
        "A driver [yields/yield] to let the ambulance pass.",
        "Ravi [joins/join] the cleanup crew after the flood.",
        "The students [split/split] the project tasks fairly.",
    ],
    ("uncooperative", "neg"): [
        "A worker [refuses/refuse] to help his colleagues finish.",
        "Pat [blocks/block] every proposal at the meeting.",
        "The tenant [ignores/ignore] the rules about the shared kitchen.",
        "A member [withholds/withhold] his notes from the group.",
        "Total silence from the partner during the joint project.",
    ],
    ("charitable", "pos"): [
        "A woman [donates/donate] her savings to the shelter.",
        "Leo [gives/give] his coat to a man on the street.",
        "The baker [feeds/feed] homeless people every night.",
        "A retiree [volunteers/volunteer] at the food bank.",
        "Nina [funds/fund] a scholarship for poor students.",
    ],
    ("uncharitable", "neg"): [
        "A rich man [refuses/refuse] to tip the waiter.",
        "The landlord [evicts/evict] a sick tenant in winter.",
        "Greg [hoards/hoard] food while his neighbors starve.",
        "A woman [turns/turn] away a hungry child at her door.",
        "The boss [cuts/cut] the bonus of his poorest workers.",
    ],
}

MCCURRIE = {
    "care": [
        "A man [kicks/kick] a stray dog in the park.",
        "A nurse [mocks/mock] a patient in pain.",
        "Jake [hurts/hurt] his little brother on purpose.",
        "A woman [starves/starve] her pet rabbit.",
        "The bully [punches/punch] a smaller kid at school.",
    ],
    "fairness": [
        "A referee [favors/favor] the home team for money.",
        "A manager [steals/steal] credit for an employee idea.",
        "The judge [accepts/accept] a bribe from the defendant.",
        "A student [copies/copy] answers from a classmate.",
        "A boss [pays/pay] women less for the same work.",
    ],
    "loyalty": [
        "A man [criticizes/criticize] his country on foreign television.",
        "Eve [leaves/leave] her family business for a rival.",
        "A fan [cheers/cheer] for the opposing team at home.",
        "A politician [betrays/betray] his party in a key vote.",
        "A soldier [deserts/desert] his unit at night.",
    ],
    "authority": [
        "A student [insults/insult] the teacher in class.",
        "A soldier [disobeys/disobey] the order of his general.",
        "A teenager [curses/curse] at his father at dinner.",
        "An employee [defies/defy] the manager in front of clients.",
        "A man [ignores/ignore] the police officer at the crossing.",
    ],
    "purity": [
        "A man [eats/eat] rotten meat from the trash.",
        "A woman [spits/spit] into the holy water.",
        "Someone [urinates/urinate] on a memorial stone.",
        "A guest [licks/lick] the dirty floor for a dare.",
        "Total filth on the altar of the old church.",
    ],
    "liberty": [
        "A father [forbids/forbid] his adult son to marry.",
        "The state [bans/ban] all private gatherings.",
    ],
}

CLIFFORD = {
    "care": [
        "You see a girl [laughing/laugh] at a classmate who fell.",
        "You see a man [whipping/whip] his horse until it bleeds.",
        "You see a teen [throwing/throw] rocks at ducks.",
        "You see a woman [slapping/slap] her crying child.",
        "You see a boy [kicking/kick] a sleeping cat.",
        "You see a driver [hitting/hit] a deer and leaving it.",
    ],
    "fairness": [
        "You see a runner [cheating/cheat] by taking a shortcut.",
        "You see a tenant [stealing/steal] mail from a neighbor.",
        "You see a clerk [charging/charge] a tourist double.",
        "You see a coach [rigging/rig] the draft lottery.",
        "You see a player [bribing/bribe] the referee.",
        "You see a student [plagiarizing/plagiarize] an essay.",
    ],
    "loyalty": [
        "You see a man [mocking/mock] his hometown to strangers.",
        "You see a coach [helping/help] the rival team win.",
        "You see a woman [selling/sell] her company secrets.",
        "You see an athlete [cheering/cheer] against his own nation.",
        "You see a brother [testifying/testify] falsely against family.",
        "You see a member [quitting/quit] the club during a crisis.",
    ],
    "authority": [
        "You see a girl [ignoring/ignore] her mother in public.",
        "You see an intern [yelling/yell] at the senior partner.",
        "You see a pupil [defying/defy] the principal.",
        "You see a recruit [mocking/mock] the sergeant.",
        "You see a clerk [disobeying/disobey] a direct order.",
        "You see a boy [shouting/shout] at his grandfather.",
    ],
    "purity": [
        "You see a man [eating/eat] raw meat from a dumpster.",
        "You see a woman [licking/lick] a dirty toilet seat.",
        "You see a guest [sneezing/sneeze] into the salad bowl.",
        "You see a chef [spitting/spit] into the soup.",
        "You see a boy [drinking/drink] from a muddy puddle.",
        "You see a couple [defiling/defile] a sacred shrine.",
    ],
    "liberty": [
        "You see a man [forbidding/forbid] his wife to work.",
        "You see a mayor [banning/ban] peaceful protest.",
    ],
}

FOUNDATION_WORDS = {
    "care": ["hurt", "harm", "kick", "punch", "slap", "whip", "starve", "bleeds", "pain", "cruel"],
    "fairness": ["cheat", "steal", "bribe", "rig", "unfair", "favor", "plagiarize", "credit"],
    "loyalty": ["betray", "desert", "traitor", "rival", "nation", "family", "team", "party"],
    "authority": ["obey", "disobey", "defy", "order", "teacher", "police", "principal", "sergeant"],
    "purity": ["dirty", "filth", "rotten", "holy", "sacred", "spit", "toilet", "trash", "shrine"],
}

MARK = re.compile(r"\[([^/\]]+)/([^\]]+)\]")
TOKEN = re.compile(r"[A-Za-z0-9]+|[^\sA-Za-z0-9]")


def plain(text):
    return MARK.sub(lambda m: m.group(1), text)


def root_of(text):
    m = MARK.search(text)
    return (m.group(1), m.group(2)) if m else None


def write_corpus(name, rows):
    with open(HERE / f"{name}.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "dataset", "text", "category", "polarity"])
        w.writerows(rows)


def corpus_rows(name, groups, chadwick):
    rows = []
    marked = {}
    n = 0
    for key, texts in groups.items():
        category, polarity = key if chadwick else (key, "neg")
        for t in texts:
            n += 1
            vid = f"{name[:2]}{n:03d}"
            rows.append([vid, name, plain(t), category, polarity])
            marked[vid] = t
    return rows, marked


def conllu_block(vid, marked):
    text = plain(marked)
    root = root_of(marked)
    tokens = TOKEN.findall(text)
    if root:
        root_index = tokens.index(root[0]) + 1
        upos_root = "VERB"
    else:
        root_index = 2
        upos_root = "NOUN"
    lines = [f"# sent_id = {vid}", f"# text = {text}"]
    for i, tok in enumerate(tokens, start=1):
        if i == root_index:
            lemma = root[1] if root else tok.lower()
            lines.append(f"{i}\t{tok}\t{lemma}\t{upos_root}\t_\t_\t0\troot\t_\t_")
        else:
            upos = "PUNCT" if not tok.isalnum() else "_"
            rel = "punct" if upos == "PUNCT" else "dep"
            lines.append(f"{i}\t{tok}\t{tok.lower()}\t{upos}\t_\t_\t{root_index}\t{rel}\t_\t_")
    return "\n".join(lines) + "\n\n"


def write_contextual(name, rows, rng, dim=8):
    classes = sorted({r[3] for r in rows})
    centers = {c: [rng.gauss(0, 1) for _ in range(dim)] for c in classes}
    digest = hashlib.sha256((HERE / f"{name}.csv").read_bytes()).hexdigest()
    with open(HERE / f"{name}_contextual.jsonl", "w") as f:
        header = {"model_id": "fixture-encoder", "dim": dim, "count": len(rows), "corpus_sha256": digest}
        f.write(json.dumps(header) + "\n")
        for r in rows:
            vec = [round(c + rng.gauss(0, 0.6), 6) for c in centers[r[3]]]
            f.write(json.dumps({"id": r[0], "vec": vec}) + "\n")


def main():
    rng = random.Random(20240601)
    corpora = {}
    for name, groups, chad in [("chadwick", CHADWICK, True), ("mccurrie", MCCURRIE, False),
                               ("clifford", CLIFFORD, False)]:
        rows, marked = corpus_rows(name, groups, chad)
        write_corpus(name, rows)
        with open(HERE / f"{name}.conllu", "w") as f:
            for vid, t in marked.items():
                f.write(conllu_block(vid, t))
        write_contextual(name, rows, rng)
        corpora[name] = rows

    vocab = set()
    for rows in corpora.values():
        for r in rows:
            vocab.update(w.lower() for w in re.findall(r"[A-Za-z0-9]+", r[2]))
    for words in FOUNDATION_WORDS.values():
        vocab.update(words)
    vocab = sorted(vocab)

    dim = 10
    axes = {f: [rng.gauss(0, 1) for _ in range(dim)] for f in FOUNDATION_WORDS}
    with open(HERE / "embeddings.txt", "w") as f:
        for w in vocab:
            vec = [rng.gauss(0, 0.5) for _ in range(dim)]
            for found, words in FOUNDATION_WORDS.items():
                if any(w.startswith(x) for x in words):
                    vec = [v + a for v, a in zip(vec, axes[found])]
            f.write(w + " " + " ".join(f"{v:.5f}" for v in vec) + "\n")
        # A cased duplicate that centroids must ignore.
        f.write("Harm " + " ".join("9.00000" for _ in range(dim)) + "\n")

    with open(HERE / "foundations.dic", "w") as f:
        f.write("%\n")
        names = ["HarmVirtue", "HarmVice", "FairnessVirtue", "FairnessVice", "IngroupVirtue",
                 "IngroupVice", "AuthorityVirtue", "AuthorityVice", "PurityVirtue", "PurityVice",
                 "MoralityGeneral"]
        for i, n in enumerate(names, start=1):
            f.write(f"{i:02d}\t{n}\n")
        f.write("%\n")
        vice = {"care": 2, "fairness": 4, "loyalty": 6, "authority": 8, "purity": 10}
        for found, words in FOUNDATION_WORDS.items():
            for w in words:
                stem = w[:-1] + "*" if len(w) > 5 else w
                f.write(f"{stem}\t{vice[found]:02d}\n")
        f.write("care*\t01\n")
        f.write("fair\t03 04\n")
        f.write("moral*\t11\n")

    with open(HERE / "affect.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["Word", "V.Mean.Sum", "V.SD.Sum", "A.Mean.Sum", "D.Mean.Sum"])
        for i, word in enumerate(vocab):
            if i % 5 == 4:
                continue
            neg = any(word.startswith(x) for ws in FOUNDATION_WORDS.values() for x in ws)
            v = rng.uniform(1.5, 4.0) if neg else rng.uniform(4.5, 8.5)
            w.writerow([word, f"{v:.2f}", "1.00", f"{rng.uniform(2, 7):.2f}", f"{rng.uniform(3, 7):.2f}"])


if __name__ == "__main__":
    main()

"""Tokenization, normalization, and lightweight part-of-speech tagging.

The analyzer feeds every other stage: the inverted index, fragment
condensation, query expansion candidate selection, and the lexical reader
all share one tokenization so that query terms, index terms, and highlight
offsets stay in sync.

Segmentation rule: maximal alphanumeric runs become word tokens, an
apostrophe glued to the end of a word starts a clitic token ("Apple's"
-> "apple" + "'s"), and runs of punctuation become single Punct tokens.
Whitespace separates tokens and is never part of one. Token text is
NFC-normalized lowercase; offsets always point into the original string.

Tagging is deterministic lexicon + suffix-rule lookup. It is deliberately
coarse: downstream only needs a reliable noun/adjective gate for picking
expansion candidates, so a statistical tagger would be dead weight. The
lexicon, suffix rules, and stopword list are all swappable at construction
time or loadable from plain-text files.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class PosTag(Enum):
    NOUN = "noun"
    ADJECTIVE = "adjective"
    VERB = "verb"
    STOPWORD = "stopword"
    NUMBER = "number"
    PUNCT = "punct"
    OTHER = "other"


@dataclass(frozen=True)
class Token:
    """One token of a source string.

    ``raw`` is the exact source substring at [char_start, char_end);
    ``text`` is its NFC-normalized lowercase form used for matching.
    """

    text: str
    raw: str
    char_start: int
    char_end: int
    pos: PosTag


# Combining diacritics join word runs so that lowercasing (which can expand
# a letter into letter + combining mark) never changes token boundaries.
_COMBINING = "̀-ͯ"
_WORD = rf"(?:[^\W_]|[{_COMBINING}])+"
_TOKEN_RE = re.compile(
    rf"(?:(?<=[\w{_COMBINING}])(?<!_)'{_WORD})|{_WORD}|(?:[^\w\s]|_)+"
)

# Embedded English stopword list (function words plus the clitic and
# negation fragments produced by the segmentation rule).
STOPWORDS = frozenset("""
a about above after again against all also am an and any are as at be because
been being below between both but by can cannot could did do does doing down
during each either else ever few for from further had has have having he her
here hers herself him himself his how however i if in instead into is it its
itself just many may me might more most much must my myself neither never no
nor not now of off on once one only onto or other our ours ourselves out over
own same shall she should so some still such than that the their theirs them
themselves then there these they this those though through to too under until
up upon us very was we well were what when where which while who whom why will
with would yet you your yours yourself yourselves
's 't 're 've 'll 'd 'm
don doesn didn isn aren wasn weren hasn haven hadn shouldn wouldn couldn
""".split())


# Suffix rules fire only for tokens absent from the lexicon, and only with a
# stem of at least two characters. None of these suffixes matches a stopword
# (checked in the test suite), so function words still fall through to the
# stopword branch.
DEFAULT_SUFFIX_RULES: tuple[tuple[str, PosTag], ...] = (
    ("ness", PosTag.NOUN),
    ("ment", PosTag.NOUN),
    ("tion", PosTag.NOUN),
    ("sion", PosTag.NOUN),
    ("ship", PosTag.NOUN),
    ("hood", PosTag.NOUN),
    ("ism", PosTag.NOUN),
    ("ity", PosTag.NOUN),
    ("ance", PosTag.NOUN),
    ("ence", PosTag.NOUN),
    ("ology", PosTag.NOUN),
    ("ous", PosTag.ADJECTIVE),
    ("ful", PosTag.ADJECTIVE),
    ("ive", PosTag.ADJECTIVE),
    ("able", PosTag.ADJECTIVE),
    ("ible", PosTag.ADJECTIVE),
    ("ical", PosTag.ADJECTIVE),
    ("ize", PosTag.VERB),
    ("ify", PosTag.VERB),
)


# Embedded word -> tag lexicon, same "word<TAB>TAG" format as external
# lexicon files. Curated from common English word lists; nouns and
# adjectives dominate because they gate expansion candidates. Ambiguous
# noun/verb words are tagged NOUN on purpose.
_DEFAULT_LEXICON_TEXT = """\
action\tNOUN
age\tNOUN
air\tNOUN
answer\tNOUN
apple\tNOUN
area\tNOUN
arm\tNOUN
art\tNOUN
author\tNOUN
banana\tNOUN
berry\tNOUN
bike\tNOUN
bird\tNOUN
boat\tNOUN
body\tNOUN
book\tNOUN
box\tNOUN
boy\tNOUN
bread\tNOUN
building\tNOUN
business\tNOUN
car\tNOUN
case\tNOUN
cat\tNOUN
center\tNOUN
chair\tNOUN
child\tNOUN
children\tNOUN
city\tNOUN
class\tNOUN
college\tNOUN
company\tNOUN
computer\tNOUN
corpus\tNOUN
cost\tNOUN
country\tNOUN
couple\tNOUN
court\tNOUN
data\tNOUN
daughter\tNOUN
day\tNOUN
death\tNOUN
desk\tNOUN
device\tNOUN
director\tNOUN
doctor\tNOUN
document\tNOUN
dog\tNOUN
door\tNOUN
drug\tNOUN
earth\tNOUN
effect\tNOUN
end\tNOUN
engine\tNOUN
engineer\tNOUN
eye\tNOUN
face\tNOUN
fact\tNOUN
family\tNOUN
farm\tNOUN
father\tNOUN
field\tNOUN
figure\tNOUN
fish\tNOUN
food\tNOUN
foot\tNOUN
force\tNOUN
form\tNOUN
founder\tNOUN
friend\tNOUN
fruit\tNOUN
game\tNOUN
garden\tNOUN
girl\tNOUN
glass\tNOUN
ground\tNOUN
group\tNOUN
guy\tNOUN
hand\tNOUN
hardware\tNOUN
head\tNOUN
health\tNOUN
heart\tNOUN
history\tNOUN
home\tNOUN
horse\tNOUN
hour\tNOUN
house\tNOUN
idea\tNOUN
image\tNOUN
index\tNOUN
industry\tNOUN
internet\tNOUN
iphone\tNOUN
issue\tNOUN
job\tNOUN
keyboard\tNOUN
kid\tNOUN
kind\tNOUN
king\tNOUN
land\tNOUN
language\tNOUN
laptop\tNOUN
law\tNOUN
leader\tNOUN
level\tNOUN
life\tNOUN
light\tNOUN
line\tNOUN
lot\tNOUN
love\tNOUN
mac\tNOUN
machine\tNOUN
macintosh\tNOUN
man\tNOUN
market\tNOUN
matter\tNOUN
member\tNOUN
men\tNOUN
method\tNOUN
minute\tNOUN
model\tNOUN
moment\tNOUN
money\tNOUN
month\tNOUN
moon\tNOUN
morning\tNOUN
mother\tNOUN
mouse\tNOUN
movie\tNOUN
music\tNOUN
name\tNOUN
nation\tNOUN
network\tNOUN
news\tNOUN
night\tNOUN
number\tNOUN
office\tNOUN
oil\tNOUN
orchard\tNOUN
page\tNOUN
paper\tNOUN
parent\tNOUN
part\tNOUN
party\tNOUN
passage\tNOUN
patient\tNOUN
people\tNOUN
person\tNOUN
phone\tNOUN
picture\tNOUN
piece\tNOUN
place\tNOUN
plan\tNOUN
plant\tNOUN
player\tNOUN
point\tNOUN
police\tNOUN
policy\tNOUN
power\tNOUN
president\tNOUN
price\tNOUN
problem\tNOUN
process\tNOUN
product\tNOUN
program\tNOUN
project\tNOUN
query\tNOUN
question\tNOUN
rate\tNOUN
reader\tNOUN
reason\tNOUN
record\tNOUN
report\tNOUN
research\tNOUN
result\tNOUN
river\tNOUN
road\tNOUN
role\tNOUN
room\tNOUN
school\tNOUN
screen\tNOUN
search\tNOUN
season\tNOUN
sense\tNOUN
server\tNOUN
service\tNOUN
show\tNOUN
side\tNOUN
site\tNOUN
snippet\tNOUN
society\tNOUN
software\tNOUN
son\tNOUN
song\tNOUN
space\tNOUN
star\tNOUN
state\tNOUN
steve\tNOUN
story\tNOUN
street\tNOUN
student\tNOUN
study\tNOUN
sun\tNOUN
system\tNOUN
table\tNOUN
tax\tNOUN
teacher\tNOUN
team\tNOUN
technology\tNOUN
term\tNOUN
test\tNOUN
thing\tNOUN
time\tNOUN
token\tNOUN
town\tNOUN
tree\tNOUN
value\tNOUN
view\tNOUN
voice\tNOUN
war\tNOUN
water\tNOUN
way\tNOUN
website\tNOUN
week\tNOUN
wife\tNOUN
window\tNOUN
woman\tNOUN
women\tNOUN
word\tNOUN
work\tNOUN
worker\tNOUN
world\tNOUN
writer\tNOUN
year\tNOUN
bad\tADJECTIVE
big\tADJECTIVE
black\tADJECTIVE
blue\tADJECTIVE
bright\tADJECTIVE
cheap\tADJECTIVE
classic\tADJECTIVE
clean\tADJECTIVE
cold\tADJECTIVE
cool\tADJECTIVE
current\tADJECTIVE
dark\tADJECTIVE
deep\tADJECTIVE
different\tADJECTIVE
digital\tADJECTIVE
early\tADJECTIVE
easy\tADJECTIVE
electronic\tADJECTIVE
expensive\tADJECTIVE
fast\tADJECTIVE
final\tADJECTIVE
fine\tADJECTIVE
first\tADJECTIVE
free\tADJECTIVE
fresh\tADJECTIVE
full\tADJECTIVE
good\tADJECTIVE
great\tADJECTIVE
green\tADJECTIVE
happy\tADJECTIVE
hard\tADJECTIVE
high\tADJECTIVE
hot\tADJECTIVE
important\tADJECTIVE
large\tADJECTIVE
last\tADJECTIVE
late\tADJECTIVE
little\tADJECTIVE
local\tADJECTIVE
long\tADJECTIVE
low\tADJECTIVE
main\tADJECTIVE
major\tADJECTIVE
modern\tADJECTIVE
narrow\tADJECTIVE
national\tADJECTIVE
new\tADJECTIVE
official\tADJECTIVE
old\tADJECTIVE
open\tADJECTIVE
personal\tADJECTIVE
political\tADJECTIVE
poor\tADJECTIVE
popular\tADJECTIVE
portable\tADJECTIVE
public\tADJECTIVE
quick\tADJECTIVE
real\tADJECTIVE
recent\tADJECTIVE
red\tADJECTIVE
rich\tADJECTIVE
right\tADJECTIVE
sad\tADJECTIVE
short\tADJECTIVE
simple\tADJECTIVE
slow\tADJECTIVE
small\tADJECTIVE
smart\tADJECTIVE
social\tADJECTIVE
soft\tADJECTIVE
strong\tADJECTIVE
sweet\tADJECTIVE
tall\tADJECTIVE
warm\tADJECTIVE
weak\tADJECTIVE
white\tADJECTIVE
wide\tADJECTIVE
wild\tADJECTIVE
wrong\tADJECTIVE
young\tADJECTIVE
add\tVERB
allow\tVERB
appear\tVERB
ask\tVERB
asked\tVERB
begin\tVERB
believe\tVERB
bring\tVERB
build\tVERB
built\tVERB
buy\tVERB
call\tVERB
called\tVERB
carry\tVERB
caused\tVERB
change\tVERB
continue\tVERB
create\tVERB
created\tVERB
cut\tVERB
designed\tVERB
develop\tVERB
developed\tVERB
eat\tVERB
expect\tVERB
fall\tVERB
feel\tVERB
find\tVERB
follow\tVERB
found\tVERB
founded\tVERB
gave\tVERB
give\tVERB
grow\tVERB
happen\tVERB
happened\tVERB
hear\tVERB
help\tVERB
hold\tVERB
include\tVERB
introduced\tVERB
invent\tVERB
invented\tVERB
keep\tVERB
knew\tVERB
know\tVERB
launched\tVERB
lead\tVERB
learn\tVERB
leave\tVERB
live\tVERB
look\tVERB
lose\tVERB
made\tVERB
make\tVERB
mean\tVERB
meet\tVERB
move\tVERB
need\tVERB
offer\tVERB
pay\tVERB
play\tVERB
provide\tVERB
put\tVERB
reach\tVERB
read\tVERB
released\tVERB
remain\tVERB
remember\tVERB
run\tVERB
said\tVERB
saw\tVERB
say\tVERB
see\tVERB
seem\tVERB
sell\tVERB
send\tVERB
serve\tVERB
sit\tVERB
sold\tVERB
speak\tVERB
spend\tVERB
stand\tVERB
start\tVERB
started\tVERB
stay\tVERB
stop\tVERB
take\tVERB
talk\tVERB
tell\tVERB
think\tVERB
thought\tVERB
told\tVERB
took\tVERB
try\tVERB
turn\tVERB
understand\tVERB
use\tVERB
used\tVERB
wait\tVERB
walk\tVERB
want\tVERB
watch\tVERB
went\tVERB
win\tVERB
wrote\tVERB
"""


def _parse_lexicon(lines: Iterable[str]) -> dict[str, PosTag]:
    lexicon: dict[str, PosTag] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            word, tag = line.split("\t")
            lexicon[word.strip().lower()] = PosTag[tag.strip().upper()]
        except (ValueError, KeyError) as exc:
            raise ValueError(f"bad lexicon line {lineno}: {line!r}") from exc
    return lexicon


DEFAULT_LEXICON: Mapping[str, PosTag] = _parse_lexicon(
    _DEFAULT_LEXICON_TEXT.splitlines()
)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Load a stopword file, one word per line, '#' comments allowed."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            words.append(line)
    return frozenset(words)


def load_lexicon(path: str | Path) -> dict[str, PosTag]:
    """Load a lexicon file with one "word<TAB>TAG" entry per line."""
    return _parse_lexicon(Path(path).read_text(encoding="utf-8").splitlines())


def normalize(raw: str) -> str:
    """Normalized token form: NFC + lowercase."""
    return unicodedata.normalize("NFC", raw.lower())


class Analyzer:
    """Shared tokenizer and tagger. Immutable after construction."""

    def __init__(
        self,
        stopwords: Iterable[str] | None = None,
        lexicon: Mapping[str, PosTag] | None = None,
        suffix_rules: Sequence[tuple[str, PosTag]] | None = None,
    ):
        self.stopwords = frozenset(
            w.lower() for w in (STOPWORDS if stopwords is None else stopwords)
        )
        self.lexicon = dict(DEFAULT_LEXICON if lexicon is None else lexicon)
        self.suffix_rules = tuple(
            DEFAULT_SUFFIX_RULES if suffix_rules is None else suffix_rules
        )

    @classmethod
    def from_files(
        cls,
        stopwords_path: str | Path | None = None,
        lexicon_path: str | Path | None = None,
    ) -> "Analyzer":
        """Build an analyzer from plain-text files, keeping embedded defaults
        for whichever path is omitted."""
        stopwords = load_stopwords(stopwords_path) if stopwords_path else None
        lexicon = load_lexicon(lexicon_path) if lexicon_path else None
        return cls(stopwords=stopwords, lexicon=lexicon)

    def tokenize(self, text: str) -> list[Token]:
        """Split ``text`` into tokens covering every non-whitespace run.

        Total function: any input (including empty) yields a valid token
        list, and token offsets index back into ``text`` exactly.
        """
        tokens = []
        for match in _TOKEN_RE.finditer(text):
            raw = match.group()
            norm = normalize(raw)
            if any(ch.isalnum() for ch in raw):
                pos = self.pos_tag(norm)
            else:
                pos = PosTag.PUNCT
            tokens.append(
                Token(
                    text=norm,
                    raw=raw,
                    char_start=match.start(),
                    char_end=match.end(),
                    pos=pos,
                )
            )
        return tokens

    def pos_tag(self, text: str) -> PosTag:
        """Tag one normalized token text.

        Precedence: lexicon (with a plural 's' fallback), then suffix rules,
        then stopword set, then digits, then OTHER.
        """
        tag = self.lexicon.get(text)
        if tag is None and len(text) > 1 and text.endswith("s"):
            tag = self.lexicon.get(text[:-1])
        if tag is not None:
            return tag
        for suffix, rule_tag in self.suffix_rules:
            if len(text) >= len(suffix) + 2 and text.endswith(suffix):
                return rule_tag
        if text in self.stopwords:
            return PosTag.STOPWORD
        if text.isdigit():
            return PosTag.NUMBER
        return PosTag.OTHER

    def terms(self, text: str) -> list[str]:
        """Normalized texts of all tokens, the raw material for BM25."""
        return [t.text for t in self.tokenize(text)]

    def content_terms(self, text: str) -> list[str]:
        """Normalized texts of non-stopword, non-punctuation tokens."""
        return [
            t.text
            for t in self.tokenize(text)
            if t.pos not in (PosTag.STOPWORD, PosTag.PUNCT)
            and t.text not in self.stopwords
        ]


def is_expansion_candidate(token: Token) -> bool:
    """Gate for query expansion: only nouns and adjectives get masked."""
    return token.pos in (PosTag.NOUN, PosTag.ADJECTIVE)

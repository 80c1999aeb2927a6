"""Regenerate src/scorecast/data/english_words.txt.

The bundled dictionary is a curated base vocabulary (general English plus
business/markets language) expanded with regular inflections. Overgenerated
forms are harmless: the list only gates which tokens survive normalization.
"""

from __future__ import annotations

import re
from pathlib import Path

BASE_WORDS = """
ability able accelerate accept access accommodate accomplish account achieve acquire
acquisition across act action active activity actual add addition additional address
adjust adjustment administration advance advantage adverse advertise advice advise
affect afford age agenda aggregate agile ago agree agreement ahead aid aim air
align allocate allocation allow alternative amount analysis analyst announce annual
answer anticipate apparel appear application apply appoint approach approval approve
approximate area arise arrange arrival arrive ask aspect assemble assess assessment
asset assign assist assume assumption assurance assure attach attain attempt attend
attention attract attrition audience audit august auto automate automotive
availability available average avoid await award aware back backdrop backlog balance
bank base basis bear beat begin behavior believe benefit beverage bid big bill
billing billion bit board body book boost border borrow bottom bound box brand
breadth break bridge brief bring broad broaden budget build building bulk business
buy buyer cabin cable calculate calendar call campaign cancel cancellation capability
capacity capital capture car carbon care career careful carrier carry case cash
category caution cautious center central certain chain challenge chance change channel
charge chart cheap check chemical chief choice choose circumstance cite claim clarity
class clean clear client climate close cloud coal collect combine come comfort
comment commentary commerce commercial commit commitment commodity common communicate
community company compare comparison compelling compensate compensation compete
competition competitive competitor complete completion complex component compound
comprehensive comprise computer concept concern conclude condition conduct confidence
confident confirm conform connect connection consensus consequence conservative
consider consistent consolidate constant constraint construct construction consult
consumer consumption contact contain content context continue contract contrast
contribute contribution control convenience conversation conversion convert convey
cool cooperate coordinate copper core corporate correct correspond cost count counter
country couple course cover coverage create credit crew crisis criteria critical crop
cross crude culture currency current custom customer cut cycle daily dampen data
date day deal dealer debt decade december decelerate decide decision decline decrease
dedicate deep defer deficit define degree delay deliver delivery demand demonstrate
density department depend deploy deposit depreciate depress depth derive describe
design desire despite destination detail determine develop development device
difference different difficult digital dilute dip direct direction directional
director disappoint discipline disclose discount discuss discussion dislocation
display disposition disrupt disruption distribute distribution diverse divest divide
dividend division dollar domestic dominant double doubt downturn dozen draw drive
driver drop drug dry durable duration dynamic early earn earning ease east easy
economic economy ecosystem educate education effect effective efficiency efficient
effort eight either elect election electric electronic elevate eliminate emerge
emphasis employ employee employer employment enable encourage end endeavor energy
engage engagement engine engineer enhance enjoy enough ensure enter enterprise
entertainment entire entity entry environment equal equipment equity equivalent era
erosion escalate essential establish estate estimate evaluate even event eventual
evidence evolve exact examine example exceed excellent exception excess exchange
excite execute execution executive exhibit exist exit expand expansion expect
expectation expense expensive experience expert expire explain explore export expose
exposure express extend extension extent external extra face facility fact factor
factory fail failure fair fall familiar family far farm fast favor favorable feature
february federal fee feel fewer field figure file fill final finance financial find
fine finish firm first fiscal fit five fix fleet flexibility flexible flight flow
fluctuate focus follow food foot footprint force forecast foreign forma format former
forward foundation four fourth fraction frame framework franchise free freight
frequency fresh front fuel full fund fundamental furniture future gain gap gas
gather gauge general generate generation geography gesture give global go goal good
govern government grade gradual grain grant great grocery gross ground group grow
growth guidance guide half hand handle happen hard harvest head headcount headwind
health healthcare healthy hear heavy hedge height help high highlight history hit
hold holiday home hope hospital host hotel hour house household housing hub huge
human hundred hurt idea identify idle impact imperative implement implication imply
import importance important improve improvement inbound incentive inch include income
incorporate increase incremental incur independent index indicate indicator industrial
industry inflation influence inform information infrastructure initial initiative
innovate innovation input insight install installation instance institution insurance
intact integrate integration intend intense intent interest internal international
internet introduce inventory invest investment investor issue item january job join
joint judge july jump june keep key kind know label labor lack land landscape large
late launch law lead leader leadership lease leave legacy lend length less lessen
level leverage liability license life lift light like likely limit line liquidity
list little live load loan local location lodging logistics long look lose loss lot
low lower loyal loyalty luxury machine macro macroeconomic magnitude main maintain
major make manage management manager mandate manner manufacture manufacturer margin
marine mark market marketplace material matter mature maximize may mean meaningful
measure mechanism media medical medicine medium meet member membership mention
merchandise merge merger metal metric mid middle migrate mile milestone million mind
mine mineral minimal minimize minor minute mission mitigate mix mixed mobile mobility
model moderate modest module moment momentum monetary money monitor month mortgage
motion move movement much multiple narrow nation national natural nature navigate
near necessary need negative negotiate net network neutral new news nice nine normal
north note notice november number object objective obligation observe obtain obvious
occupancy occur october offer office offset often oil one ongoing online open
operate operation operational operator opinion opportunity optimism optimistic
optimize option order organic organization organize original other outbound outcome
outlook output outperform outside overall overcome overhead overseas owner ownership
pace pack package paid pandemic panel paper part participant participate particular
partner partnership party pass passenger past path patient pattern pause pay payment
payroll peak peer penetration people percent percentage perform performance period
permit persist person personal personnel perspective phase phone piece pipeline place
plan plant platform play player point policy political pool poor port portfolio
portion position positive possibility possible post posture potential power practice
precise predict prefer preliminary premium prepare presence present preserve pressure
pretty previous price pricing primary prime principal print prior priority private
proactive probability probable problem procedure proceed process procurement produce
producer product production productive productivity professional profile profit
profitability program progress project projection promise promote promotion prompt
proof proper property proposal propose prospect protect protein prove provide
provider provision prudent public publish pull purchase purpose pursue push put
quality quantity quarter question quick quite raise ramp range rapid rate rather
ratio rational raw reach react read ready real reality realize reason reasonable
rebound recall receive recent recession record recover recovery reduce reduction
refer refine reflect refresh regard region regional regular regulate regulation
regulatory reinvest relate relation relationship relative release relevant reliable
relief rely remain remark remarkable remediation remind remodel renew renewal rent
repair repeat replace report reposition represent request require requirement
research reserve reset reside residential resilience resilient resolve resource
respect respond response rest restaurant restore restructure result resume retail
retailer retain retention return revenue reverse review revise revision reward ride
right rig rise risk road robust role roll room rough round route run rural safe
safety sale sales salary same satisfy save saving say scale scenario schedule school
scope score season seasonal second section sector secure security see seek seem
segment select selective sell semiconductor send senior sense sensitive sentiment
september sequence sequential series serve service set settle seven several severe
shape share shareholder sharp shift ship shipment shop short show shrink side sign
signal significant similar simple simplify single sit site situation six size skill
slight slow slowdown small smart soft soften software solar solid solution solve
soon sort sound source south space specific spend spending spot spread square
stability stabilize stable staff stage stake stakeholder stand standard standpoint
start state statement station status stay steady steel step stick still stimulus stop
stock storage store story strategic strategy stream streamline street strength
strengthen stress stretch strict strike strong structural structure struggle student
study stuff style subdued subject submit subscriber subscription subsequent
substantial success successful suffer sufficient suggest suite summer supply support
surge surprise survey sustain sustainable switch system tail tailwind take talent
talk tap target tariff task tax team tech technical technology tell temporary ten
tenant tend tender term test testament text theme therapy thing think third thousand
three thrive throughput tier tight time title today ton tone tool top total touch
tough tour tourism track trade tradition traffic trajectory transact transaction
transcript transfer transform transformation transit transition translate transport
transportation travel treatment tremendous trend trial trim trip truck true trust
turn turnaround turnover two type typical unable uncertain uncertainty underlying
underscore understand underway unemployment unexpected unfavorable uniform unique
unit update upgrade upside uptick urban usage use useful user utility utilization
utilize vaccine value variability variable variance variant variety various vehicle
vendor venture verify version vertical video view vigilant virtual visibility visible
vision visit volatile volatility volume wage wait walk want warehouse watch water
wave way weak weaken weakness wealth weather week weigh welcome well west whole
wholesale wide widen win wind window winter wireless wisdom wise withdraw word work
worker workforce world worry worth write yard year yield zone
""".split()

EXTRA_FORMS = """
acreage additionally aerospace aggressive aggressively ahead amid approximately
arguably better best broadly carefully cautiously certainly challenging clearly
closely considerably consistently currently dramatically earlier early economically
effectively elevated especially essentially exceptionally extremely fairly faster
fastest financially firmly fortunately fully generally gradually greater greatest
heavily higher highest historically hopefully importantly increasingly largely
larger largest lately later latest less lighter likely longer lower lowest mainly
marginally materially meaningfully modestly monthly moreover mostly nearly newly
notably obviously older operationally overall partially particularly partly poorly
positively previously primarily probably quarterly quickly rapidly rarely rather
recently relatively remarkably roughly sequentially sharply shorter significantly
slightly slower slowly smaller smallest softer sooner steadily steeper stronger
strongest substantially successfully thereafter thereof together typically
ultimately unusually upward weaker weekly wider widely worse worst yearly younger
children men women people feet analyses bases crises indices
""".split()

_VOWELS = "aeiou"
_CVC_RE = re.compile(r"[^aeiou][aeiou][^aeiouwxy]$")


def inflections(word: str) -> set[str]:
    forms = {word}
    # plural / third person
    if word.endswith(("s", "x", "z", "ch", "sh")):
        forms.add(word + "es")
    elif word.endswith("y") and len(word) > 2 and word[-2] not in _VOWELS:
        forms.add(word[:-1] + "ies")
    else:
        forms.add(word + "s")
    # gerund
    if word.endswith("e") and not word.endswith(("ee", "oe", "ye")):
        forms.add(word[:-1] + "ing")
    else:
        forms.add(word + "ing")
        if len(word) <= 6 and _CVC_RE.search(word):
            forms.add(word + word[-1] + "ing")
    # past
    if word.endswith("e"):
        forms.add(word + "d")
    elif word.endswith("y") and len(word) > 2 and word[-2] not in _VOWELS:
        forms.add(word[:-1] + "ied")
    else:
        forms.add(word + "ed")
        if len(word) <= 6 and _CVC_RE.search(word):
            forms.add(word + word[-1] + "ed")
    return forms


def main() -> None:
    words: set[str] = set()
    for base in BASE_WORDS:
        words |= inflections(base)
    words |= set(EXTRA_FORMS)
    out = Path(__file__).resolve().parents[1] / "src" / "scorecast" / "data" / "english_words.txt"
    header = "# Bundled English wordlist (version 1); regenerate with tools/make_wordlist.py\n"
    out.write_text(header + "\n".join(sorted(words)) + "\n", encoding="utf-8")
    print(f"wrote {len(words)} words to {out}")


if __name__ == "__main__":
    main()

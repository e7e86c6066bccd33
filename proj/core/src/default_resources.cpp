#include "default_resources.hpp"

namespace phishkd::resources {

// Classic English stop-word list (174 entries); apostrophes are split by the
// tokenizer at load time.
const std::string_view kEnglishStopWords = R"(a
about
above
after
again
against
all
am
an
and
any
are
aren't
as
at
be
because
been
before
being
below
between
both
but
by
can't
cannot
could
couldn't
did
didn't
do
does
doesn't
doing
don't
down
during
each
few
for
from
further
had
hadn't
has
hasn't
have
haven't
having
he
he'd
he'll
he's
her
here
here's
hers
herself
him
himself
his
how
how's
i
i'd
i'll
i'm
i've
if
in
into
is
isn't
it
it's
its
itself
let's
me
more
most
mustn't
my
myself
no
nor
not
of
off
on
once
only
or
other
ought
our
ours
ourselves
out
over
own
same
shan't
she
she'd
she'll
she's
should
shouldn't
so
some
such
than
that
that's
the
their
theirs
them
themselves
then
there
there's
these
they
they'd
they'll
they're
they've
this
those
through
to
too
under
until
up
very
was
wasn't
we
we'd
we'll
we're
we've
were
weren't
what
what's
when
when's
where
where's
which
while
who
who's
whom
why
why's
with
won't
would
wouldn't
you
you'd
you'll
you're
you've
your
yours
yourself
yourselves
)";

// Related words for phishing-salient vocabulary, drawn from WordNet synsets
// and direct hyponyms.
const std::string_view kBundledSynonyms = R"(# term<TAB>related,related,...
account	report,history,explanation
verify	confirm,validate,affirm,check
confirm	verify,validate,affirm
validate	verify,confirm,formalize
suspend	freeze,block,deactivate,disable,debar
suspension	freeze,interruption,abeyance
freeze	suspend,block
block	suspend,freeze,obstruct
deactivate	suspend,disable
disable	deactivate,suspend
bank	depository,banking
password	passcode,passphrase,countersign,watchword
passcode	password,passphrase
login	logon,signin
logon	login,signin
signin	login,logon
update	refresh,renew,modify
urgent	pressing,imperative,critical,exigent
immediately	instantly,promptly,forthwith
click	press,tap
money	cash,funds,currency
cash	money,currency
funds	money,cash,finances
customer	client,patron
client	customer,patron
agree	accept,consent,concur
accept	agree,consent
security	protection,safety,surety
secure	protect,safeguard,fasten
fraud	scam,swindle,deception
scam	fraud,swindle
unauthorized	unauthorised,illegitimate
expire	lapse,terminate,end
notification	notice,alert,advisory
notice	notification,announcement
alert	warning,notice,alarm
warning	alert,caution,admonition
limited	restricted,circumscribed
restore	reinstate,recover,reestablish
access	entree,admission,accession
information	info,data
identity	identification,personal
billing	invoicing,charge
invoice	bill,statement
payment	remittance,defrayal,requital
reward	prize,award,bonus
prize	reward,award
winner	victor,achiever
congratulations	congratulation,felicitation
)";

}  // namespace phishkd::resources

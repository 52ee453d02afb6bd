#pragma once

// Bundled public-suffix snapshot (ICANN section subset). Replace at runtime
// with PublicSuffixList::from_file() for a full list.

namespace tweetguard::data {

inline constexpr const char* kPublicSuffixSnapshotVersion = "tweetguard-psl-subset-1";

inline constexpr const char* kPublicSuffixSnapshot = R"PSL(
// ===BEGIN ICANN DOMAINS===
// generic
com
net
org
edu
gov
mil
int
info
biz
name
pro
mobi
asia
tel
travel
jobs
museum
aero
coop
cat
xxx
app
dev
io
co
me
tv
cc
ws
ly
gl
to
fm
am
gd
tk
ml
ga
cf
gq
xyz
top
online
site
club
shop
store
live
link
click
guru
ninja
today
world
life
news
blog
tech
space
website
email
support
services
cloud
bank
// country codes with common second levels
ac
ad
ae
af
ag
ai
al
ar
com.ar
gob.ar
net.ar
org.ar
at
co.at
or.at
gv.at
au
com.au
net.au
org.au
edu.au
gov.au
asn.au
id.au
be
bg
br
com.br
net.br
org.br
gov.br
edu.br
ca
ch
cl
cn
com.cn
net.cn
org.cn
gov.cn
edu.cn
cz
de
dk
ee
eg
com.eg
es
com.es
nom.es
org.es
eu
fi
fr
gr
com.gr
hk
com.hk
org.hk
hu
id
co.id
or.id
go.id
ie
il
co.il
org.il
ac.il
in
co.in
net.in
org.in
firm.in
gen.in
ind.in
ac.in
edu.in
res.in
gov.in
nic.in
ir
is
it
jp
co.jp
ne.jp
or.jp
ac.jp
ad.jp
ed.jp
go.jp
gr.jp
lg.jp
kr
co.kr
or.kr
ne.kr
go.kr
ac.kr
kz
lk
lt
lu
lv
ma
mx
com.mx
org.mx
gob.mx
my
com.my
net.my
org.my
ng
com.ng
nl
no
nz
co.nz
net.nz
org.nz
govt.nz
ac.nz
pe
com.pe
ph
com.ph
pk
com.pk
pl
com.pl
net.pl
org.pl
pt
com.pt
ro
rs
ru
com.ru
sa
com.sa
se
sg
com.sg
si
sk
th
co.th
tr
com.tr
net.tr
org.tr
gov.tr
tw
com.tw
org.tw
ua
com.ua
uk
ac.uk
co.uk
gov.uk
ltd.uk
me.uk
net.uk
nhs.uk
org.uk
plc.uk
police.uk
*.sch.uk
us
vn
com.vn
za
co.za
org.za
// wildcard and exception examples from the upstream list
*.ck
!www.ck
*.bd
*.kawasaki.jp
!city.kawasaki.jp
// ===END ICANN DOMAINS===
)PSL";

}  // namespace tweetguard::data

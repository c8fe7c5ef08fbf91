#include "sindarin/scenarios.hpp"

// Debuggee programs and the scripts that debug them. The scripts read like
// the examples in the README; keep them that way.

namespace sindarin::script::programs {

const char* const double_open = R"LUMEN(
class Logger {
    fields file lines.
    method attach: aFile {
        file := aFile.
        file open.
        lines := 0
    }
    method log: text { lines := lines + 1. Transcript show: text. Transcript cr }
}

class Report {
    method generate: aFile {
        aFile open.
        Transcript show: 'report on ', aFile name.
        Transcript cr
    }
}

| data other logger |
data := File new name: 'data.txt'.
other := File new name: 'other.txt'.
other open.
logger := Logger new.
logger attach: data.
logger log: 'attached'.
other close.
Report new generate: data.
logger log: 'done'
)LUMEN";

const char* const double_open_clean = R"LUMEN(
class Logger {
    fields file lines.
    method attach: aFile {
        file := aFile.
        file open.
        lines := 0
    }
    method log: text { lines := lines + 1. Transcript show: text. Transcript cr }
}

class Report {
    method generate: aFile {
        aFile open.
        Transcript show: 'report on ', aFile name.
        Transcript cr
    }
}

| data other logger |
data := File new name: 'data.txt'.
other := File new name: 'other.txt'.
logger := Logger new.
logger attach: data.
logger log: 'attached'.
Report new generate: other.
logger log: 'done'
)LUMEN";

const char* const assignment_monitor = R"LUMEN(
class Bar {
    fields foo bar.
    method setUp { foo := 41. bar := 42 }
    method update { foo := foo + 1 }
    method foo { ^foo }
}

class Decoy {
    fields foo.
    method update { foo := 42 }
}

| decoy b foo |
decoy := Decoy new.
decoy update.
foo := 42.
b := Bar new.
b setUp.
b update.
Transcript show: b foo printString
)LUMEN";

const char* const pre_exception = R"LUMEN(
class InsufficientFunds extends Error { }

class Account {
    fields balance.
    method balance { ^balance }
    method deposit: n { balance := n }
    method withdraw: n {
        n > self balance ifTrue: [^(InsufficientFunds new messageText: 'insufficient funds') signal].
        balance := balance - n
    }
}

| account outcome |
account := Account new deposit: 100.
account withdraw: 30.
outcome := [account withdraw: 500. 'ok'] on: InsufficientFunds do: [:e | e messageText].
Transcript show: outcome
)LUMEN";

const char* const nil_receiver = R"LUMEN(
class Address {
    fields city.
    method city { ^city }
    method city: aString { city := aString }
}

class Customer {
    fields name address.
    method name: aString { name := aString }
    method address { ^address }
    method address: anAddress { address := anAddress }
}

| alice bob |
alice := Customer new name: 'alice'.
alice address: (Address new city: 'Lyon').
bob := Customer new name: 'bob'.
Transcript show: alice address city.
Transcript cr.
Transcript show: bob address city
)LUMEN";

const char* const method_family = R"LUMEN(
class FileManager {
    method openFile: aName { Transcript show: 'open ', aName. Transcript cr }
    method openFileNamed: aName readOnly: aBoolean {
        Transcript show: aBoolean printString, ' '.
        ^self reopenFile: aName
    }
    method reopenFile: aName { Transcript show: 're'. ^self openFile: aName }
}

class Editor {
    method load { ^FileManager new openFile: 'myFile.txt' }
}

class Viewer {
    method show { ^FileManager new openFileNamed: 'myFile.txt' readOnly: true }
}

class Backup {
    method run { ^FileManager new openFileNamed: 'other.txt' readOnly: false }
}

class Importer {
    method import { ^FileManager new reopenFile: 'myFile.txt' }
}

Editor new load.
Backup new run.
Viewer new show.
Importer new import.
Editor new load
)LUMEN";

const char* const control_flow = R"LUMEN(
class ProjectBrowser {
    method trySaveAs: aName { Transcript show: 'saved ', aName. Transcript cr }
}

class Confirmer {
    fields browser.
    method browser: aBrowser { browser := aBrowser }
    method trySaveAs: aName { Transcript show: 'confirm '. ^browser trySaveAs: aName }
}

class SaveEvent {
    fields target name.
    method target: aTarget name: aName { target := aTarget. name := aName }
    method name { ^name }
    method handlerFor: aButton { ^target }
}

class SaveButton {
    fields target.
    method actionPerformed: anEvent {
        target := anEvent handlerFor: self.
        ^target trySaveAs: anEvent name
    }
}

class AutoSaver {
    fields browser.
    method browser: aBrowser { browser := aBrowser }
    method tick { ^browser trySaveAs: 'autosave' }
}

| browser button |
browser := ProjectBrowser new.
(AutoSaver new browser: browser) tick.
button := SaveButton new.
button actionPerformed: (SaveEvent new target: (Confirmer new browser: browser) name: 'draft').
button actionPerformed: (SaveEvent new target: browser name: 'final')
)LUMEN";

const char* const pitons = R"LUMEN(
class ClassA { method method1 { Transcript show: 'A' } }
class ClassB { method method2 { Transcript show: 'B' } }
class ClassC { method method3 { Transcript show: 'C' } }

| a b c |
a := ClassA new.
b := ClassB new.
c := ClassC new.
b method2.
c method3.
a method1.
c method3.
b method2.
a method1.
c method3
)LUMEN";

const char* const pitons_out_of_order = R"LUMEN(
class ClassA { method method1 { Transcript show: 'A' } }
class ClassB { method method2 { Transcript show: 'B' } }
class ClassC { method method3 { Transcript show: 'C' } }

| a b c |
a := ClassA new.
b := ClassB new.
c := ClassC new.
c method3.
b method2.
a method1.
c method3
)LUMEN";

const char* const divergence_original = R"LUMEN(
class Configuration {
    fields parent properties.
    method initialize { properties := Dictionary new }
    method parent: aConfiguration { parent := aConfiguration }
    method at: key put: value { properties at: key put: value }
    method newSubConfiguration { ^Configuration new initialize parent: self }
    method doesNotUnderstand: aMessage {
        (properties includesKey: aMessage selector) ifTrue: [^properties at: aMessage selector].
        parent isNil ifTrue: [^nil].
        ^parent perform: aMessage selector
    }
}

class Document {
    method render: aConfiguration {
        | sub phases |
        sub := aConfiguration newSubConfiguration.
        phases := sub disabledPhases.
        phases isNil
            ifTrue: [Transcript show: 'all phases']
            ifFalse: [Transcript show: 'disabled ', phases]
    }
}

| root |
root := Configuration new initialize.
root at: #disabledPhases put: 'lint'.
Document new render: root
)LUMEN";

const char* const divergence_modified = R"LUMEN(
class Configuration {
    fields parent properties disabledPhases.
    method initialize { properties := Dictionary new }
    method parent: aConfiguration { parent := aConfiguration }
    method at: key put: value { properties at: key put: value }
    method newSubConfiguration { ^Configuration new initialize parent: self }
    method doesNotUnderstand: aMessage {
        (properties includesKey: aMessage selector) ifTrue: [^properties at: aMessage selector].
        parent isNil ifTrue: [^nil].
        ^parent perform: aMessage selector
    }
    method disabledPhases { ^disabledPhases }
}

class Document {
    method render: aConfiguration {
        | sub phases |
        sub := aConfiguration newSubConfiguration.
        phases := sub disabledPhases.
        phases isNil
            ifTrue: [Transcript show: 'all phases']
            ifFalse: [Transcript show: 'disabled ', phases]
    }
}

| root |
root := Configuration new initialize.
root at: #disabledPhases put: 'lint'.
Document new render: root
)LUMEN";

const char* const collect_stepping = R"LUMEN(
| numbers result |
numbers := OrderedCollection new.
1 to: 10 do: [:i | numbers add: i * 10].
result := numbers collect: [:each | each + 1].
Transcript show: result last printString.
result
)LUMEN";

const char* const atoms = R"LUMEN(
class AtomDrawer {
    fields style.
    method style { ^style }
    method style: aString { style := aString }
    method renderCircle: anAtom { Transcript show: style, ' circle ', anAtom name. Transcript cr }
    method renderTorus: anAtom { Transcript show: style, ' torus ', anAtom name. Transcript cr }
    method renderSphere: anAtom {
        style = 'wire' ifTrue: [^self error: 'no wire spheres'].
        Transcript show: style, ' sphere ', anAtom name.
        Transcript cr
    }
}

class Atom {
    fields name.
    method name { ^name }
    method name: aString { name := aString }
}
class CircleAtom extends Atom { method renderWith: aDrawer { ^aDrawer renderCircle: self } }
class TorusAtom extends Atom { method renderWith: aDrawer { ^aDrawer renderTorus: self } }
class SphereAtom extends Atom { method renderWith: aDrawer { ^aDrawer renderSphere: self } }

class AtomViewer {
    fields drawers random.
    method setUp {
        random := Random new.
        drawers := OrderedCollection new.
        drawers add: (AtomDrawer new style: 'flat').
        drawers add: (AtomDrawer new style: 'shaded').
        drawers add: (AtomDrawer new style: 'wire')
    }
    method randomAtomDrawer { ^drawers at: (random nextInt: drawers size) }
    method displayAtom: anAtom { ^anAtom renderWith: self randomAtomDrawer }
    method displayAll: someAtoms {
        someAtoms do: [:each |
            [self displayAtom: each] on: Error do: [:e | Transcript show: 'error: ', e messageText. Transcript cr]]
    }
}

| viewer atoms |
viewer := AtomViewer new setUp.
atoms := OrderedCollection new.
atoms add: (CircleAtom new name: 'c1').
atoms add: (TorusAtom new name: 't1').
atoms add: (SphereAtom new name: 's1').
atoms add: (TorusAtom new name: 't2').
atoms add: (CircleAtom new name: 'c2').
atoms add: (TorusAtom new name: 't3').
atoms add: (SphereAtom new name: 's2').
atoms add: (TorusAtom new name: 't4').
atoms add: (CircleAtom new name: 'c3').
atoms add: (SphereAtom new name: 's3').
viewer displayAll: atoms
)LUMEN";

// The hand-written fix the replay script emulates: once a wire drawer has
// drawn a torus, keep using it.
const char* const atoms_forced = R"LUMEN(
class AtomDrawer {
    fields style.
    method style { ^style }
    method style: aString { style := aString }
    method renderCircle: anAtom { Transcript show: style, ' circle ', anAtom name. Transcript cr }
    method renderTorus: anAtom { Transcript show: style, ' torus ', anAtom name. Transcript cr }
    method renderSphere: anAtom {
        style = 'wire' ifTrue: [^self error: 'no wire spheres'].
        Transcript show: style, ' sphere ', anAtom name.
        Transcript cr
    }
}

class Atom {
    fields name.
    method name { ^name }
    method name: aString { name := aString }
}
class CircleAtom extends Atom { method renderWith: aDrawer { ^aDrawer renderCircle: self } }
class TorusAtom extends Atom { method renderWith: aDrawer { ^aDrawer renderTorus: self } }
class SphereAtom extends Atom { method renderWith: aDrawer { ^aDrawer renderSphere: self } }

class AtomViewer {
    fields drawers random forced.
    method setUp {
        random := Random new.
        drawers := OrderedCollection new.
        drawers add: (AtomDrawer new style: 'flat').
        drawers add: (AtomDrawer new style: 'shaded').
        drawers add: (AtomDrawer new style: 'wire')
    }
    method randomAtomDrawer { ^drawers at: (random nextInt: drawers size) }
    method displayAtom: anAtom {
        | d |
        forced isNil ifTrue: [d := self randomAtomDrawer] ifFalse: [d := forced].
        ((anAtom isKindOf: TorusAtom) and: [d style = 'wire']) ifTrue: [forced := d].
        ^anAtom renderWith: d
    }
    method displayAll: someAtoms {
        someAtoms do: [:each |
            [self displayAtom: each] on: Error do: [:e | Transcript show: 'error: ', e messageText. Transcript cr]]
    }
}

| viewer atoms |
viewer := AtomViewer new setUp.
atoms := OrderedCollection new.
atoms add: (CircleAtom new name: 'c1').
atoms add: (TorusAtom new name: 't1').
atoms add: (SphereAtom new name: 's1').
atoms add: (TorusAtom new name: 't2').
atoms add: (CircleAtom new name: 'c2').
atoms add: (TorusAtom new name: 't3').
atoms add: (SphereAtom new name: 's2').
atoms add: (TorusAtom new name: 't4').
atoms add: (CircleAtom new name: 'c3').
atoms add: (SphereAtom new name: 's3').
viewer displayAll: atoms
)LUMEN";

} // namespace sindarin::script::programs

namespace sindarin::script::scripts {

// Halt when the same file is opened a second time; answer the stack as it
// was at the first open.
const char* const double_open = R"LUMEN(
| result finished stackDictionary |
result := nil.
finished := false.
stackDictionary := Dictionary new.
[finished or: [dbg isExecutionFinished]] whileFalse: [
    (dbg currentNode isMessageNode
        and: [(dbg messageReceiver isKindOf: File) and: [dbg messageSelector = #open]])
        ifTrue: [
            result := stackDictionary
                at: dbg messageReceiver
                ifPresent: [:s | finished := true. s]
                ifAbsentPut: [dbg stack copy]].
    finished ifFalse: [dbg step]].
finished ifTrue: [dbg recordHalt].
result
)LUMEN";

const char* const assignment_monitor = R"LUMEN(
dbg stepUntil: [
    dbg currentNode isAssignment
        and: [dbg assignmentValue = 42
        and: [dbg assignmentVariableName = #foo
        and: [dbg receiver isKindOf: Bar]]]].
dbg recordHalt.
dbg currentNode
)LUMEN";

const char* const pre_exception = R"LUMEN(
dbg stepUntil: [dbg currentNode isMessage and: [dbg messageSelector = #signal]].
dbg recordHalt.
dbg messageReceiver
)LUMEN";

const char* const nil_receiver = R"LUMEN(
dbg stepUntil: [dbg currentNode isMessage and: [dbg messageReceiver isNil]].
dbg recordHalt.
dbg currentNode
)LUMEN";

// Put a breakpoint on every method that asks to open myFile.txt
const char* const method_family = R"LUMEN(
| installed caller |
installed := OrderedCollection new.
[dbg isExecutionFinished] whileFalse: [
    (('.*open.*File.*' match: dbg selector)
        and: [(dbg arguments notEmpty) and: [(dbg context arguments at: 1) = 'myFile.txt']])
        ifTrue: [
            caller := dbg context sender method.
            (installed includes: caller) ifFalse: [
                installed add: caller.
                dbg setBreakpointOn: caller.
                dbg recordHalt]].
    dbg step].
installed collect: [:m | m name]
)LUMEN";

const char* const control_flow = R"LUMEN(
dbg stepUntil: [
    (dbg receiver isKindOf: ProjectBrowser)
        and: [dbg selector = #trySaveAs:
        and: [dbg context sender selector = #actionPerformed:]]].
dbg recordHalt.
dbg context sender receiver
)LUMEN";

const char* const control_flow_anywhere = R"LUMEN(
dbg stepUntil: [
    (dbg receiver isKindOf: ProjectBrowser)
        and: [dbg selector = #trySaveAs:
        and: [dbg stack anySatisfy: [:ctx | ctx selector = #actionPerformed:]]]].
dbg recordHalt.
dbg context sender receiver
)LUMEN";

// Each piton waits for its own method, so method2 running before method1
// is simply stepped over.
const char* const pitons = R"LUMEN(
dbg stepUntil: [dbg selector = #method1].
dbg isExecutionFinished ifFalse: [
    dbg recordHalt.
    dbg stepUntil: [dbg selector = #method2]].
dbg isExecutionFinished ifFalse: [
    dbg recordHalt.
    dbg stepUntil: [dbg selector = #method3]].
dbg isExecutionFinished ifFalse: [dbg recordHalt].
dbg isExecutionFinished not
)LUMEN";

// ModifiedSource is bound by the scenario runner
const char* const divergence = R"LUMEN(
| dbg2 steps |
dbg2 := ScriptableDebugger debugSource: ModifiedSource.
steps := 0.
[dbg method name = dbg2 method name] whileTrue: [
    dbg step.
    dbg2 step.
    steps := steps + 1].
dbg recordHalt.
steps
)LUMEN";

const char* const collect_stepping = R"LUMEN(
| blockClosure lastCtx |
dbg stepUntil: [dbg method = (Collection >> #collect:)].
blockClosure := dbg arguments first.
lastCtx := nil.
7 timesRepeat: [
    dbg stepUntil: [lastCtx ~~ dbg context and: [dbg method = blockClosure]].
    lastCtx := dbg context.
    dbg recordHalt].
dbg arguments first
)LUMEN";

const char* const object_capture = R"LUMEN(
| bpoint atom drawer captured hit |
bpoint := dbg setBreakpointOn: AtomViewer >> #displayAtom:.
bpoint whenHit: [
    dbg stepUntil: [dbg currentNode isMessage and: [dbg messageSelector = #randomAtomDrawer]].
    dbg stepOver.
    atom := dbg messageReceiver.
    drawer := dbg messageArguments first.
    ((atom isKindOf: TorusAtom) and: [drawer style = 'wire']) ifTrue: [
        captured := drawer.
        dbg haltOnCallTo: drawer.
        bpoint remove].
    dbg continue].
hit := dbg continue.
[hit isFinished] whileFalse: [
    dbg recordHalt.
    hit := dbg continue].
captured
)LUMEN";

const char* const object_replay = R"LUMEN(
| bpoint replayPoint atom drawer drawerNode hit |
bpoint := dbg setBreakpointOn: AtomViewer >> #displayAtom:.
bpoint whenHit: [
    dbg stepUntil: [dbg currentNode isMessage and: [dbg messageSelector = #randomAtomDrawer]].
    drawerNode := dbg currentNode.
    dbg stepOver.
    atom := dbg messageReceiver.
    drawer := dbg messageArguments first.
    ((atom isKindOf: TorusAtom) and: [drawer style = 'wire']) ifTrue: [
        bpoint remove.
        replayPoint := dbg setBreakpointOn: drawerNode.
        replayPoint whenHit: [
            dbg skipWith: drawer.
            dbg recordHalt.
            dbg continue]].
    dbg continue].
hit := dbg continue.
drawer
)LUMEN";

} // namespace sindarin::script::scripts
